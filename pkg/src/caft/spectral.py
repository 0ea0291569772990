"""2D Fourier analysis and synthesis of image planes.

Images are ``(height, width, channels)`` float arrays. Spectra keep one
complex plane per channel, stored channel-major as ``(channels, height,
width)``. The forward transform is unnormalised and the inverse carries the
``1/(height*width)`` factor, so ``idft2(dft2(x)) == x`` up to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import fft as native_fft
from .errors import SymmetryError, ValidationError

Layout = Literal["dc-at-origin", "dc-centered"]
Backend = Literal["numpy", "native"]

IMAG_TOLERANCE = 1e-6


@dataclass(frozen=True)
class Spectrum:
    data: np.ndarray  # (channels, height, width) complex128
    layout: Layout = "dc-at-origin"

    def __post_init__(self):
        if self.data.ndim != 3:
            raise ValidationError(f"spectrum data must be 3-D, got shape {self.data.shape}")
        if self.layout not in ("dc-at-origin", "dc-centered"):
            raise ValidationError(f"unknown layout {self.layout!r}")

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]


def as_image(img) -> np.ndarray:
    """Validate and promote an image to a float64 ``(H, W, C)`` array.

    2-D input is treated as a single channel.
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        raise ValidationError(f"image must be (H, W) or (H, W, C), got shape {arr.shape}")
    h, w, c = arr.shape
    if h < 1 or w < 1 or c < 1:
        raise ValidationError(f"image dimensions must be positive, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("image contains non-finite values")
    return arr


def _forward(planes: np.ndarray, backend: Backend) -> np.ndarray:
    if backend == "numpy":
        return np.fft.fft2(planes)
    if backend == "native":
        return native_fft.fft2(planes)
    raise ValidationError(f"unknown backend {backend!r}")


def _inverse(planes: np.ndarray, backend: Backend) -> np.ndarray:
    if backend == "numpy":
        return np.fft.ifft2(planes)
    if backend == "native":
        return native_fft.ifft2(planes)
    raise ValidationError(f"unknown backend {backend!r}")


def dft2(img, backend: Backend = "numpy") -> Spectrum:
    """Per-channel unnormalised 2D DFT, DC at index (0, 0)."""
    arr = as_image(img)
    planes = np.ascontiguousarray(np.moveaxis(arr, -1, 0))
    return Spectrum(_forward(planes.astype(np.complex128), backend), "dc-at-origin")


def idft2(spec: Spectrum, backend: Backend = "numpy") -> np.ndarray:
    """Inverse of :func:`dft2`, returning an unclamped ``(H, W, C)`` image.

    Raises :class:`SymmetryError` if any output element keeps an imaginary
    part of magnitude ``>= 1e-6``.
    """
    if spec.layout != "dc-at-origin":
        raise ValidationError("idft2 expects a dc-at-origin spectrum; call unshift_center first")
    out = _inverse(spec.data, backend)
    residue = float(np.max(np.abs(out.imag))) if out.size else 0.0
    if residue >= IMAG_TOLERANCE:
        raise SymmetryError(
            f"inverse transform left imaginary residue {residue:.3g} "
            f"(tolerance {IMAG_TOLERANCE:g}); spectrum is not conjugate-symmetric"
        )
    return np.ascontiguousarray(np.moveaxis(out.real, 0, -1))


def _center_offsets(spec: Spectrum) -> tuple[int, int]:
    return spec.height // 2, spec.width // 2


def shift_center(spec: Spectrum) -> Spectrum:
    """Cyclically move DC from (0, 0) to (H // 2, W // 2)."""
    if spec.layout != "dc-at-origin":
        raise ValidationError("shift_center expects a dc-at-origin spectrum")
    return Spectrum(np.roll(spec.data, _center_offsets(spec), axis=(1, 2)), "dc-centered")


def unshift_center(spec: Spectrum) -> Spectrum:
    """Exact inverse of :func:`shift_center`, for odd and even sizes."""
    if spec.layout != "dc-centered":
        raise ValidationError("unshift_center expects a dc-centered spectrum")
    dy, dx = _center_offsets(spec)
    return Spectrum(np.roll(spec.data, (-dy, -dx), axis=(1, 2)), "dc-at-origin")


def to_polar(spec: Spectrum) -> tuple[np.ndarray, np.ndarray]:
    """Split a spectrum into magnitude and phase grids.

    Phase lies in (-pi, pi]; a zero bin gets phase 0.
    """
    data = spec.data
    magnitude = np.abs(data)
    phase = np.angle(data)
    # angle() returns -pi for values on the negative real axis with -0.0 imag
    phase = np.where(phase <= -np.pi, np.pi, phase)
    phase = np.where(magnitude == 0, 0.0, phase)
    return magnitude, phase


def from_polar(magnitude, phase, layout: Layout = "dc-at-origin") -> Spectrum:
    magnitude = np.asarray(magnitude, dtype=np.float64)
    phase = np.asarray(phase, dtype=np.float64)
    if magnitude.shape != phase.shape:
        raise ValidationError(f"magnitude {magnitude.shape} and phase {phase.shape} differ in shape")
    if np.any(magnitude < 0):
        raise ValidationError("magnitude must be non-negative")
    return Spectrum(magnitude * np.exp(1j * phase), layout)


def hermitian_part(spec: Spectrum) -> Spectrum:
    """Project a dc-at-origin spectrum onto the spectra of real images.

    Returns ``(F[k, l] + conj(F[-k, -l])) / 2``; the inverse transform of the
    result equals the real part of the inverse transform of ``spec``.
    """
    if spec.layout != "dc-at-origin":
        raise ValidationError("hermitian_part expects a dc-at-origin spectrum")
    mirrored = np.roll(spec.data[:, ::-1, ::-1], (1, 1), axis=(1, 2))
    return Spectrum((spec.data + np.conj(mirrored)) / 2, "dc-at-origin")

