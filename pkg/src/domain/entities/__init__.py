# Domain entities
