from floerd.api.v1.routes import knots, metabolizers, obstruction, surgery

__all__ = ["knots", "metabolizers", "obstruction", "surgery"]
