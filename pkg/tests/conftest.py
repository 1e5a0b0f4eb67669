# Pin BLAS to one thread before numpy loads: the determinism contracts are
# single-threaded, and bit-identical reruns are asserted across the suite.
import os

for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
    os.environ.setdefault(_var, "1")
