"""Thompson-sampling adaptive control for linear quadratic regulators"""

__version__ = "0.1.0"

from tsac.main import main
