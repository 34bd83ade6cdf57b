# Domain exceptions
