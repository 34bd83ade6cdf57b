# Domain layer - numerical entities, kernels and rules
