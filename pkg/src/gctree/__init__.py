"""Navigation and subtree equality on grammar-compressed trees."""

from .encodings import bin_decode, bin_encode, bin_nav, fcns_decode, fcns_encode
from .equality import EqCursor, EqIndex, lcs_query, reduce_grammar, subtree_eq
from .errors import (
    CycleError,
    FingerprintContradiction,
    GrammarError,
    GrammarSyntaxError,
    GuardExceeded,
    LengthOverflow,
    RankError,
)
from .generate import generate_tslp, random_slp, random_tslp
from .grammar import (
    DEFAULT_GUARD,
    Slp,
    Tslp,
    canonical_text,
    eval_slp,
    eval_tslp,
    parse_slp,
    parse_tslp,
    serialize_slp,
    serialize_tslp,
)
from .nextlink import NextLinkIndex, TrieForest, build_tries, reduce_L, reduce_R
from .slp import lcp, substring_slp, symbol_at, tslp_equal
from .strcursor import SlpWalker, StringCursor
from .transform import binarize_slp, classify, monadize, normalize, normalize_monadic
from .tree import Tree, parse_term
from .treecursor import TreeCursor, TreeIndex, derive_spine

__version__ = "0.1.0"
