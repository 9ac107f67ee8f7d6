"""Combinatorial and algebraic invariants of linkage moduli spaces."""
from .errors import (DomainError, EmptySpace, EvenD, GuardExceeded, LengthMismatch,
                     LinkageError, NonPositive, NotGeneric, NotOrdered, NotRegular,
                     ParseError, PresentationMismatch, UnknownGenerator)
from .lenvec import (EPS, LengthEntry, LengthVector, Verdict, Weight, classify_subset,
                     contract, derive_minus, derive_plus, indices_of, is_d_regular,
                     is_d_regular_ordered, is_generic, is_ordered, mask_of,
                     sort_with_permutation, subset_weight, tight_witness)
from .short_complex import (Fingerprint, ShortComplex, a_vector, fingerprint,
                            same_chamber_up_to_permutation, short_complex)

__version__ = "0.1.0"
