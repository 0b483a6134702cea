"""Concrete syntax: AST, parser, pretty-printer and structural transforms."""

from .ast import *  # noqa: F401,F403
from .parser import (
    parse_command, parse_derivation, parse_pcommand, parse_pred, parse_program, parse_term,
)
from .pretty import command_str, pcommand_str, pred_str, pretty_print, term_str
from .transforms import (
    alpha_equal, encode_mutual_recursion, free_vars, normalize, replace_at, structurally_equal,
    subst, subterm,
)
