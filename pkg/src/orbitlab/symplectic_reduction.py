"""Reduced spaces of the Hamiltonian B- and B1-actions on G.f0.

For an in-image strongly regular B-orbit the reduced variety
p^{-1}(Omega_{r,+-})/B is a single point; its quantization is 1 exactly
when the central characters of the series and of T_{m,+-} agree, which
reproduces the one-in-three selection rule.  For B1 and f0 in the
holomorphic cone the reduced variety p1^{-1}(Omega^{-+})/B1 is a
2-sphere whose Liouville volume integral equals f0H, matching the
multiplicity of T_-+ in the restriction; outside the cone it is a
noncompact surface.

The sphere volume is evaluated by quadrature of the explicit pullback

    (1/2) f0H sin(theta) (f0Z^2 - f0H^2) / (f0Z + f0H cos(theta))^2
        dtheta ^ dphi

over [0, pi] x [0, 2 pi], normalized by 2 pi; the closed form is
(f0Z^2 - f0H^2)/2 . [1/(|f0Z| - |f0H|) - 1/(|f0Z| + |f0H|)] = |f0H|.
The W-coordinate of the reduced point over p(f_theta) is the
homographic function

    phi(t) = (2 f0Z - 3 (f0Z^2 - f0H^2)/(f0H t + f0Z)) / 6,  t = cos(theta),

which coincides with the orbit invariant r(k) at the matching angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coadjoint_orbits import OrbitDescriptor, ReprLabel, repr_to_orbit
from .discrete_series import DiscreteSeriesParam, central_character_selects
from .lie_su21 import InvalidParameter
from .moment_projection import NotInRegularSet, holomorphic_cone, orbit_in_image

POINT = "Point"
SPHERE2 = "Sphere2"
NONCOMPACT = "NoncompactSurface"
EMPTY = "Empty"


@dataclass(frozen=True)
class ReducedVariety:
    kind: str
    volume: float | None = None

    def __post_init__(self):
        if self.kind == SPHERE2 and not (self.volume and self.volume > 0):
            raise InvalidParameter("a 2-sphere reduced variety carries a positive volume")


def classify_reduced(ds: DiscreteSeriesParam, target: str,
                     orbit: OrbitDescriptor) -> ReducedVariety:
    """Reduced variety over an orbit: point (B), sphere or noncompact (B1).

    Orbits outside the image of the projection give Empty.
    """
    if target not in ("B", "B1"):
        raise InvalidParameter("target must be 'B' or 'B1'")
    if orbit.group != target:
        raise InvalidParameter(f"orbit group {orbit.group} does not match target {target}")
    if not orbit_in_image(ds, orbit):
        return ReducedVariety(EMPTY)
    if target == "B":
        return ReducedVariety(POINT)
    if holomorphic_cone(ds.f0H, ds.f0Z):
        return ReducedVariety(SPHERE2, volume=reduced_volume(ds.f0H, ds.f0Z))
    return ReducedVariety(NONCOMPACT)


def _integrand(f0H: float, f0Z: float, theta):
    return 0.5 * f0H * np.sin(theta) * (f0Z * f0Z - f0H * f0H) \
        / (f0Z + f0H * np.cos(theta)) ** 2


def reduced_volume(f0H, f0Z, quadrature_n: int = 2000) -> float:
    """Liouville volume of the reduced sphere by composite Simpson quadrature.

    Requires the holomorphic cone (otherwise the integrand has a pole in
    the domain).  Converges to |f0H| at fourth order in 1/n.
    """
    if not holomorphic_cone(f0H, f0Z):
        raise InvalidParameter("reduced sphere volume needs the holomorphic cone")
    n = int(quadrature_n)
    if n < 2:
        raise InvalidParameter("quadrature_n must be at least 2")
    if n % 2:
        n += 1
    theta = np.linspace(0.0, math.pi, n + 1)
    phi_w = _simpson_weights(n) * (2 * math.pi / n)
    theta_w = _simpson_weights(n) * (math.pi / n)
    vals = _integrand(float(f0H), float(f0Z), theta)
    inner = float(theta_w @ vals)         # integral over theta
    total = inner * float(np.sum(phi_w))  # phi integral of a constant
    return abs(total) / (2 * math.pi)


def _simpson_weights(n: int) -> np.ndarray:
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / 3.0


def reduced_volume_closed_form(f0H, f0Z) -> float:
    if not holomorphic_cone(f0H, f0Z):
        raise InvalidParameter("reduced sphere volume needs the holomorphic cone")
    a, b = abs(float(f0Z)), abs(float(f0H))
    return 0.5 * (a * a - b * b) * (1.0 / (a - b) - 1.0 / (a + b))


def reduced_point_coordinate(f0H, f0Z, theta: float) -> float:
    """W-pairing of the reduced point over p(f_theta): phi(cos theta)."""
    t = math.cos(theta)
    den = float(f0H) * t + float(f0Z)
    if den == 0.0:
        raise NotInRegularSet("f0H cos(theta) + f0Z = 0: fiber not strongly regular")
    return (2.0 * float(f0Z) - 3.0 * (float(f0Z) ** 2 - float(f0H) ** 2) / den) / 6.0


def quantize_point(ds: DiscreteSeriesParam, m: int, sign: int) -> int:
    """Quantization of the reduced point attached to T_{m,+-}: 0 or 1.

    1 when the orbit of T_{m,+-} lies in the image of p and the central
    characters match; empty reduced varieties quantize to 0.
    """
    orbit = repr_to_orbit(ReprLabel("B", sign, m))
    if not orbit_in_image(ds, orbit):
        return 0
    return 1 if central_character_selects(ds, m) else 0
