"""Matrix-product-state algorithms."""
from magic_lab.mps.core import MPS, compress, fidelity, from_dense, product_mps, random_mps
from magic_lab.mps.replica import replica_m_n

__all__ = ["MPS", "compress", "fidelity", "from_dense", "product_mps", "random_mps", "replica_m_n"]
