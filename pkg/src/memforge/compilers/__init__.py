"""Compilers from register machines and matrix grammars to P systems."""

from .common import CompileWarning, GadgetTag, Namer
from .mg import MG_OPS, compile_mg
from .rm import RM_OPS, compile_rm

__all__ = ["CompileWarning", "GadgetTag", "Namer", "MG_OPS", "RM_OPS", "compile_mg", "compile_rm"]
