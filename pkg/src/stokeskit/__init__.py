"""Exact, desk-scale computations with Stokes stratified spaces and Stokes functors over Q."""
from .linalg import QMatrix, CochainComplex
from .poset import Poset, MonotoneMap, PosetError, SimplicialComplex, face_poset, is_final
from .space import StokesSpace, FiberwiseMap, total_poset, underlying_set, is_level_morphism, is_graduation_morphism
from .functors import (
    VectFunctor, NatTransformation, FunctorError, InconclusiveError, KanExtension, lan, induced,
    induce_from_set, graduation, graded, gr_p, is_split, is_cocartesian, is_stokes, hom_space, hom_dim,
    rhom, ext_dims, find_iso, iso_exists, strip_summand,
)
from .stokes_ops import (
    sections, stokes_locus, LevelStructure, devissage_check, is_elementary, hybrid_descent_check,
)
from .polyhedral import AffineForm, Polyhedron, polyhedral_space, polyhedral_elementarity_criterion
from .irregular import PuiseuxExponential, IrregularClass, stokes_directions, circle_space, level_filtration
from .comparison import StokesData, from_stokes_matrices, to_stokes_matrices, common_grading, monodromy

__version__ = "0.1.0"
