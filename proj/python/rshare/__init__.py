from ._rshare import *  # noqa: F401,F403
from ._rshare import PriceMode, __doc__  # noqa: F401
