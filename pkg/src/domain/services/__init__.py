# Domain services - numerical kernels
