from sympy import simplify

from catalog.builtin import sign_matrix


def element_index(group, negated, n=6):
    """Index of the diagonal sign matrix negating the listed 1-based coordinates."""
    return group.locate(sign_matrix(n, negated))


def sector_for(sectors, images):
    return next(s for s in sectors if s.hom_class.representative.images == tuple(images))


def same_value(a, b) -> bool:
    return simplify(a - b) == 0
