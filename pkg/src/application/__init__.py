# Application layer
