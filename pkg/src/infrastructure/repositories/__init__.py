# Infrastructure repositories
