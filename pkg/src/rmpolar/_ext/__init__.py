"""Hot kernels: ``bec_kernel`` (compiled, optional) and ``bec_kernel_py``."""
