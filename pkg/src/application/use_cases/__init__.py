# Use cases
