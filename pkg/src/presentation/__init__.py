# Presentation layer
