"""Radix-2 and Bluestein FFT along the last axis.

Vectorised over all leading axes. Power-of-two lengths use an iterative
decimation-in-time butterfly; every other length goes through Bluestein's
chirp-z convolution padded to the next power of two.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@lru_cache(maxsize=64)
def _bitrev(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    rev.setflags(write=False)
    return rev


@lru_cache(maxsize=64)
def _twiddles(m: int) -> np.ndarray:
    w = np.exp(-2j * np.pi * np.arange(m) / (2 * m))
    w.setflags(write=False)
    return w


def _fft_pow2(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    lead = x.shape[:-1]
    a = x[..., _bitrev(n)]
    m = 1
    while m < n:
        a = a.reshape(*lead, n // (2 * m), 2, m)
        even = a[..., 0, :]
        odd = a[..., 1, :] * _twiddles(m)
        a = np.concatenate([even + odd, even - odd], axis=-1)
        m *= 2
    return a.reshape(*lead, n)


@lru_cache(maxsize=64)
def _chirp(n: int) -> tuple[np.ndarray, np.ndarray, int]:
    # k^2 reduced mod 2n keeps the chirp angle small and exact for large k
    k = np.arange(n, dtype=np.int64)
    w = np.exp(-1j * np.pi * ((k * k) % (2 * n)) / n)
    size = 1 << (2 * n - 2).bit_length()
    b = np.zeros(size, dtype=np.complex128)
    b[:n] = np.conj(w)
    b[size - n + 1:] = np.conj(w[1:])[::-1]
    fb = _fft_pow2(b)
    w.setflags(write=False)
    fb.setflags(write=False)
    return w, fb, size


def _fft_bluestein(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    w, fb, size = _chirp(n)
    a = np.zeros(x.shape[:-1] + (size,), dtype=np.complex128)
    a[..., :n] = x * w
    conv = _ifft_pow2(_fft_pow2(a) * fb)
    return conv[..., :n] * w


def _ifft_pow2(x: np.ndarray) -> np.ndarray:
    return np.conj(_fft_pow2(np.conj(x))) / x.shape[-1]


def fft(x: np.ndarray) -> np.ndarray:
    """Unnormalised forward DFT along the last axis."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[-1]
    if n == 0:
        raise ValueError("cannot transform an empty axis")
    if n == 1:
        return x.copy()
    if _is_pow2(n):
        return _fft_pow2(x)
    return _fft_bluestein(x)


def ifft(x: np.ndarray) -> np.ndarray:
    """Inverse DFT along the last axis, carrying the full 1/n factor."""
    x = np.asarray(x, dtype=np.complex128)
    return np.conj(fft(np.conj(x))) / x.shape[-1]


def fft2(x: np.ndarray) -> np.ndarray:
    """Row-column 2D DFT over the last two axes."""
    rows = fft(x)
    return np.swapaxes(fft(np.swapaxes(rows, -1, -2)), -1, -2)


def ifft2(x: np.ndarray) -> np.ndarray:
    rows = ifft(x)
    return np.swapaxes(ifft(np.swapaxes(rows, -1, -2)), -1, -2)
