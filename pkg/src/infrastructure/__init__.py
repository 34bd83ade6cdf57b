# Infrastructure layer
