"""Decision-directed image-leakage compensation.

A single complex coefficient ``gamma`` reconstructs the desired subcarrier
from the observed pair: ``Zhat = Z' + diag(gamma, conj(gamma)) @ Zbar'`` and
``Zbarhat = diag(conj(gamma), gamma) @ Z' + Zbar'``.  With
``gamma = -beta / conj(alpha)`` the image leakage cancels exactly and both
compensated pairs again satisfy the differential relation, so the running
coefficient can be adapted from decision-directed residuals with scalar LMS
steps; one shared gamma serves every subcarrier pair.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .iqi import IqiParams
from .numerics import PskConstellation
from .ofdm import SubcarrierObservation
from .stbc import AlamoutiMatrix, ml_differential_detect_indices

DEFAULT_STEP_SIZE = 0.005

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def gamma_true(params: IqiParams) -> complex:
    """Coefficient that exactly nulls the image leakage: -beta / conj(alpha)."""
    return -params.beta / np.conj(params.alpha)


@dataclass(frozen=True)
class CompensatorState:
    gamma: complex = 0.0 + 0.0j
    step_size: float = DEFAULT_STEP_SIZE
    updates: int = 0


def compensate_observation(obs: SubcarrierObservation, gamma: complex) -> SubcarrierObservation:
    """Apply the widely-linear correction to both blocks of an observation."""
    gamma_c = complex(gamma).conjugate()
    return SubcarrierObservation(
        subcarrier=obs.subcarrier,
        z_k=obs.z_k + obs.zbar_k.diag_mul(gamma),
        z_next=obs.z_next + obs.zbar_next.diag_mul(gamma),
        zbar_k=obs.zbar_k + obs.z_k.diag_mul(gamma_c),
        zbar_next=obs.zbar_next + obs.z_next.diag_mul(gamma_c),
    )


def build_residuals(
    obs: SubcarrierObservation,
    info: AlamoutiMatrix,
) -> tuple[tuple[complex, complex], tuple[complex, complex]]:
    """Scalar LMS sample pairs from the raw (uncompensated) observation.

    ``info`` must be the block-to-block ratio actually transmitted (the
    detected info matrix including any unitarity scaling).  With
    ``Xi = Z'_next - Z'_k @ U`` and ``Delta = Zbar'_next - Zbar'_k @ U``
    the two usable equations linear in gamma are the (1,1) entries and the
    conjugated (2,1) entries: ``(Xi[0,0], Delta[0,0])`` and
    ``(conj(Xi[1,0]), conj(Delta[1,0]))``.
    """
    xi = obs.z_next - obs.z_k @ info
    delta = obs.zbar_next - obs.zbar_k @ info
    return ((xi.a, delta.a), (-xi.b, -delta.b))


def lms_step(state: CompensatorState, xi: complex, delta: complex) -> CompensatorState:
    """One stochastic-gradient descent step on |xi + gamma*delta|^2."""
    error = xi + state.gamma * delta
    gamma = state.gamma - state.step_size * error * complex(delta).conjugate()
    return CompensatorState(gamma=gamma, step_size=state.step_size, updates=state.updates + 1)


def decision_directed_pass(
    block_pair_stream,
    state: CompensatorState,
    constellation: PskConstellation,
) -> tuple[np.ndarray, CompensatorState, np.ndarray]:
    """Compensate, detect and adapt across a stream of block-pair observations.

    ``block_pair_stream`` yields, per block pair, the observations of the
    lower-index member of each active (n, mirror) pair in ascending order.
    Each observation is processed once: compensate with the current gamma,
    detect the info matrices of both the desired and the image subcarrier,
    then run two LMS updates from the decision-directed residuals.

    Returns the detected bit stream (per observation: desired-subcarrier
    symbol pair then image-subcarrier symbol pair, MSB first), the final
    compensator state and the gamma value after every update.
    """
    points = constellation.points_list
    bits_of_index = constellation.bits_of_index
    bps = constellation.bits_per_symbol
    shifts = np.arange(bps - 1, -1, -1)
    indices: list[int] = []
    trajectory: list[complex] = []
    for pair_observations in block_pair_stream:
        for obs in pair_observations:
            comp = compensate_observation(obs, state.gamma)
            i1, i2 = ml_differential_detect_indices(comp.z_k, comp.z_next, constellation)
            # conjugating the compensated mirror pair turns its differential
            # relation back into the direct form, so the same detector applies
            m1, m2 = ml_differential_detect_indices(
                comp.zbar_k.conjugate(), comp.zbar_next.conjugate(), constellation
            )
            # the transmit chain scales each info matrix by 1/sqrt(2) to keep
            # blocks unitary, so the block-to-block ratio carries that factor
            info = AlamoutiMatrix(points[i1] * _INV_SQRT2, points[i2] * _INV_SQRT2)
            (xi1, delta1), (xi2, delta2) = build_residuals(obs, info)
            state = lms_step(state, xi1, delta1)
            trajectory.append(state.gamma)
            state = lms_step(state, xi2, delta2)
            trajectory.append(state.gamma)
            indices.extend((i1, i2, m1, m2))
    index_arr = np.asarray(indices, dtype=np.int64).reshape(-1) if indices else np.empty(0, dtype=np.int64)
    values = bits_of_index[index_arr]
    bits = ((values[:, None] >> shifts) & 1).astype(np.int8).reshape(-1)
    return bits, state, np.asarray(trajectory, dtype=np.complex128)


def save_gamma_trajectory(path, trajectory: np.ndarray) -> None:
    """Write the adaptation history as CSV rows (iteration, Re, Im)."""
    trajectory = np.asarray(trajectory, dtype=np.complex128)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["iteration", "gamma_re", "gamma_im"])
        for i, value in enumerate(trajectory):
            writer.writerow([i + 1, f"{value.real:.9g}", f"{value.imag:.9g}"])
