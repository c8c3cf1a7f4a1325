"""Catalog of linear kinetic models in Fourier space, in block form.

Every model splits the state into macroscopic variables ``M`` and
microscopic variables ``mu``::

    dM/dt  = ik L_MM M  + ik L_Mmu mu
    dmu/dt = ik L_muM M + ik L_mumu mu + C mu

Units are dimensionless with the Knudsen number set to one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import CatalogError, PreconditionError

__all__ = [
    "BlockLinearKineticModel",
    "FourierState",
    "MODEL_NAMES",
    "build_model",
    "full_generator",
    "model_to_dict",
    "model_from_dict",
    "catalog_json",
]

_BLOCKS = ("L_MM", "L_Mmu", "L_muM", "L_mumu", "C")


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class BlockLinearKineticModel:
    name: str
    macro_names: tuple
    micro_names: tuple
    L_MM: np.ndarray
    L_Mmu: np.ndarray
    L_muM: np.ndarray
    L_mumu: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        for blk in _BLOCKS:
            object.__setattr__(self, blk, _frozen(getattr(self, blk)))
        nM, nm = self.dim_macro, self.dim_micro
        shapes = {
            "L_MM": (nM, nM),
            "L_Mmu": (nM, nm),
            "L_muM": (nm, nM),
            "L_mumu": (nm, nm),
            "C": (nm, nm),
        }
        for blk, shape in shapes.items():
            if getattr(self, blk).shape != shape:
                raise ValueError(
                    f"{self.name}: block {blk} has shape "
                    f"{getattr(self, blk).shape}, expected {shape}"
                )

    @property
    def dim_macro(self) -> int:
        return len(self.macro_names)

    @property
    def dim_micro(self) -> int:
        return len(self.micro_names)

    @property
    def dim(self) -> int:
        return self.dim_macro + self.dim_micro

    def __repr__(self):
        return (
            f"BlockLinearKineticModel(name={self.name!r}, "
            f"macro={self.macro_names}, micro={self.micro_names})"
        )


@dataclass(frozen=True)
class FourierState:
    """One Fourier mode of the full state at wave number ``k``."""

    macro: np.ndarray
    micro: np.ndarray
    k: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "macro", np.asarray(self.macro, dtype=complex))
        object.__setattr__(self, "micro", np.asarray(self.micro, dtype=complex))

    @classmethod
    def from_vector(cls, model, vector, k):
        vector = np.asarray(vector, dtype=complex)
        if vector.shape != (model.dim,):
            raise PreconditionError(
                f"state of length {vector.shape} does not match {model.name} "
                f"(expected {model.dim})"
            )
        return cls(vector[: model.dim_macro], vector[model.dim_macro :], k)

    def vector(self):
        return np.concatenate([self.macro, self.micro])

    def check(self, model):
        if self.macro.shape != (model.dim_macro,) or self.micro.shape != (model.dim_micro,):
            raise PreconditionError(
                f"state lengths ({self.macro.size}, {self.micro.size}) do not "
                f"match {model.name} ({model.dim_macro}, {model.dim_micro})"
            )


def _grad3_1d():
    # (p, u | sigma)
    return BlockLinearKineticModel(
        name="grad3_1d",
        macro_names=("p", "u"),
        micro_names=("sigma",),
        L_MM=[[0.0, -5.0 / 3.0], [-1.0, 0.0]],
        L_Mmu=[[0.0], [-1.0]],
        L_muM=[[0.0, -4.0 / 3.0]],
        L_mumu=[[0.0]],
        C=[[-1.0]],
    )


def _grad13_1d():
    # (rho, u, T | sigma, q)
    return BlockLinearKineticModel(
        name="grad13_1d",
        macro_names=("rho", "u", "T"),
        micro_names=("sigma", "q"),
        L_MM=[[0.0, -1.0, 0.0], [-1.0, 0.0, -1.0], [0.0, -2.0 / 3.0, 0.0]],
        L_Mmu=[[0.0, 0.0], [-1.0, 0.0], [0.0, -2.0 / 3.0]],
        L_muM=[[0.0, -4.0 / 3.0, 0.0], [0.0, 0.0, -5.0 / 2.0]],
        L_mumu=[[0.0, -8.0 / 15.0], [-1.0, 0.0]],
        C=[[-1.0, 0.0], [0.0, -2.0 / 3.0]],
    )


def _grad13_lateral():
    # (u_perp | sigma_perp, q_perp), one transverse component. The stress
    # amplitude s multiplies (e e_y + e_y e), so e . sigma_perp = s e_y.
    return BlockLinearKineticModel(
        name="grad13_lateral",
        macro_names=("u_perp",),
        micro_names=("sigma_perp", "q_perp"),
        L_MM=[[0.0]],
        L_Mmu=[[-1.0, 0.0]],
        L_muM=[[-1.0], [0.0]],
        L_mumu=[[0.0, -2.0 / 5.0], [-1.0, 0.0]],
        C=[[-1.0, 0.0], [0.0, -2.0 / 3.0]],
    )


_CATALOG = {
    "grad3_1d": _grad3_1d,
    "grad13_1d": _grad13_1d,
    "grad13_lateral": _grad13_lateral,
}
MODEL_NAMES = tuple(_CATALOG)


def build_model(name: str) -> BlockLinearKineticModel:
    """Return the catalog model called ``name``."""
    try:
        factory = _CATALOG[name]
    except (KeyError, TypeError):
        raise CatalogError(
            f"unknown model {name!r}; valid names: {', '.join(MODEL_NAMES)}"
        ) from None
    return factory()


def full_generator(model: BlockLinearKineticModel, k: float) -> np.ndarray:
    """Complex generator ``G(k)`` with ``d/dt [M; mu] = G(k) [M; mu]``."""
    ik = 1j * float(k)
    top = np.hstack([ik * model.L_MM, ik * model.L_Mmu])
    bottom = np.hstack([ik * model.L_muM, ik * model.L_mumu + model.C])
    return np.vstack([top, bottom])


def _nested(a):
    return [[float(x) for x in row] for row in a]


def model_to_dict(model: BlockLinearKineticModel) -> dict:
    d = {
        "name": model.name,
        "dim_macro": model.dim_macro,
        "dim_micro": model.dim_micro,
        "macro_names": list(model.macro_names),
        "micro_names": list(model.micro_names),
    }
    d["blocks"] = {blk: _nested(getattr(model, blk)) for blk in _BLOCKS}
    return d


def model_from_dict(d: dict) -> BlockLinearKineticModel:
    blocks = d["blocks"]
    macro = tuple(d.get("macro_names") or [f"M{i}" for i in range(d["dim_macro"])])
    micro = tuple(d.get("micro_names") or [f"mu{i}" for i in range(d["dim_micro"])])
    return BlockLinearKineticModel(
        name=d["name"], macro_names=macro, micro_names=micro,
        **{blk: blocks[blk] for blk in _BLOCKS},
    )


def catalog_json(indent=2) -> str:
    """JSON text of the whole catalog."""
    return json.dumps([model_to_dict(build_model(n)) for n in MODEL_NAMES], indent=indent)
