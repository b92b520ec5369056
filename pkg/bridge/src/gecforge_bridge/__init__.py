from .server import ModelBackend, delegate_backend, dummy_backend, handle_frame, serve

__version__ = "0.1.0"
