# Tests
