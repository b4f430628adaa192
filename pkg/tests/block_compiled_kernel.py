"""pytest plugin: hide the compiled DP kernel so the numpy lane is exercised.

Usage: ``pytest -p block_compiled_kernel``. Must be loaded before steinitz
is imported, which pytest's -p handling guarantees.
"""

import sys
from importlib.abc import MetaPathFinder


class BlockCompiledKernel(MetaPathFinder):
    def find_spec(self, fullname, path=None, target=None):
        if fullname == "steinitz._dpkernel":
            raise ImportError("compiled kernel blocked: testing the pure-python lane")
        return None


sys.meta_path.insert(0, BlockCompiledKernel())
