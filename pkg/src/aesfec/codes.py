"""Code constructions and codebook-membership oracles.

The AES code encrypts a k-bit message padded with n-k zero bits; membership
of a 128-bit word is tested by decrypting it and checking that the padding
positions come back zero. A uniformly random non-codeword passes that check
with probability exactly 2^-(n-k) because decryption is a bijection, so the
oracle has a known, small false-acceptance rate rather than none.

The baseline is a systematic random linear code G = [I_k | P] whose oracle
checks the syndrome H y^T = 0 with H = [P^T | I_{n-k}].

Oracles work on batches of packed words, one row of ceil(n/8) bytes per
word, bit position p at byte p >> 3, mask 0x80 >> (p & 7). That layout is
what np.packbits produces and what the guessing decoders XOR patterns into.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .aes_core import Aes128, BLOCK_BITS
from .bitblock import BitVec, concat, split, zero_padding

__all__ = [
    "CodeParams",
    "MembershipOracle",
    "AesPadOracle",
    "RlcCode",
    "RlcOracle",
    "aes_encode",
    "rlc_generate",
    "rlc_encode",
    "message_bit_mask",
    "pad_bit_mask",
]


@dataclass(frozen=True)
class CodeParams:
    """Block length n and message length k of an (n, k) code."""

    n: int
    k: int

    def __post_init__(self):
        if self.k <= 0 or self.n < self.k:
            raise ValueError(f"need 0 < k <= n, got n={self.n}, k={self.k}")

    @property
    def rate(self):
        return self.k / self.n

    @property
    def pad_bits(self):
        return self.n - self.k

    @property
    def nbytes(self):
        return (self.n + 7) // 8


def _position_mask(params, positions):
    bits = np.zeros(8 * params.nbytes, dtype=np.uint8)
    bits[positions] = 1
    return np.packbits(bits)


def message_bit_mask(params):
    """Packed mask selecting the first k bit positions of an n-bit word."""
    return _position_mask(params, np.arange(params.k))


def pad_bit_mask(params):
    """Packed mask selecting the last n-k bit positions of an n-bit word."""
    return _position_mask(params, np.arange(params.k, params.n))


class MembershipOracle(ABC):
    """Answers whether a hard-decision word is a codeword, and for which message.

    decode_batch is the vectorized core; everything else is sugar on top of
    it. Decoded blocks are returned for every row but are only meaningful
    where the acceptance mask is True.
    """

    def __init__(self, params):
        self.params = params

    @abstractmethod
    def decode_batch(self, words):
        """(B, nbytes) packed words -> (accept mask (B,), decoded blocks (B, nbytes))."""

    def accept_mask(self, words):
        return self.decode_batch(words)[0]

    def first_accept(self, words):
        """Index and decoded block of the first accepted row, or None."""
        ok, blocks = self.decode_batch(words)
        if not ok.any():
            return None
        idx = int(np.argmax(ok))
        return idx, blocks[idx]

    def query(self, word):
        """Test one word; returns the decoded k-bit message, or None."""
        if len(word) != self.params.n:
            raise ValueError(f"expected {self.params.n}-bit word, got {len(word)}")
        hit = self.first_accept(np.frombuffer(word.to_bytes(), dtype=np.uint8).reshape(1, -1))
        if hit is None:
            return None
        block = BitVec.from_bytes(hit[1].tobytes(), self.params.n)
        return split(block, self.params.k)[0]


class AesPadOracle(MembershipOracle):
    """Membership test for the AES code: decrypt, accept iff padding is zero.

    One oracle query costs exactly one AES decryption; the plaintext from
    that same decryption is the decoded block, so accepted rows are never
    decrypted twice.
    """

    def __init__(self, params, cipher):
        if params.n != BLOCK_BITS:
            raise ValueError(f"AES code needs n = {BLOCK_BITS}, got n = {params.n}")
        super().__init__(params)
        if isinstance(cipher, (bytes, str)):
            cipher = Aes128(cipher)
        self.cipher = cipher
        self._pad_mask = pad_bit_mask(params)

    def decode_batch(self, words):
        pt = self.cipher.decrypt_batch(words)
        ok = ~np.any(pt & self._pad_mask, axis=1)
        return ok, pt


def aes_encode(m, params, cipher):
    """Zero-pad a k-bit message to 128 bits and encrypt it."""
    if len(m) != params.k:
        raise ValueError(f"expected {params.k}-bit message, got {len(m)}")
    if params.n != BLOCK_BITS:
        raise ValueError(f"AES code needs n = {BLOCK_BITS}, got n = {params.n}")
    return cipher.encrypt(concat(m, zero_padding(params.pad_bits)))


class RlcCode:
    """Systematic random linear code defined by its parity block P."""

    def __init__(self, params, p_matrix, seed=None):
        p = np.asarray(p_matrix, dtype=np.uint8)
        if p.shape != (params.k, params.pad_bits):
            raise ValueError(f"P must be {(params.k, params.pad_bits)}, got {p.shape}")
        if p.size and p.max() > 1:
            raise ValueError("P must be binary")
        self.params = params
        self.seed = seed
        self.P = p

    @property
    def generator_matrix(self):
        return np.hstack([np.eye(self.params.k, dtype=np.uint8), self.P])

    @property
    def parity_check_matrix(self):
        return np.hstack([self.P.T, np.eye(self.params.pad_bits, dtype=np.uint8)])

    def encode_bits(self, msgs):
        """(B, k) message bits -> (B, n) codeword bits."""
        msgs = np.asarray(msgs, dtype=np.uint8)
        parity = (msgs.astype(np.uint16) @ self.P.astype(np.uint16)) & 1
        return np.hstack([msgs, parity.astype(np.uint8)])

    def to_text(self):
        """Dimensions header plus one hex row of G per line."""
        width = (self.params.n + 3) // 4
        lines = [f"rlc n={self.params.n} k={self.params.k} seed={self.seed}"]
        for row in self.generator_matrix:
            lines.append(BitVec.from_array(row).to_hex().rjust(width, "0"))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = lines[0].split()
        if head[0] != "rlc":
            raise ValueError(f"not an rlc matrix header: {lines[0]!r}")
        fields = dict(part.split("=", 1) for part in head[1:])
        params = CodeParams(n=int(fields["n"]), k=int(fields["k"]))
        seed = None if fields.get("seed") in (None, "None") else int(fields["seed"])
        if len(lines) - 1 != params.k:
            raise ValueError(f"expected {params.k} generator rows, got {len(lines) - 1}")
        g = np.array([BitVec.from_hex(ln.strip(), params.n).to_array() for ln in lines[1:]], dtype=np.uint8)
        if not np.array_equal(g[:, : params.k], np.eye(params.k, dtype=np.uint8)):
            raise ValueError("generator matrix is not in systematic form")
        return cls(params, g[:, params.k :], seed=seed)


def rlc_generate(params, seed):
    """Draw a systematic RLC with i.i.d. uniform parity block from a seed."""
    rng = np.random.default_rng(seed)
    p = rng.integers(0, 2, size=(params.k, params.pad_bits), dtype=np.uint8)
    return RlcCode(params, p, seed=seed)


def rlc_encode(m, code):
    """Encode one message BitVec systematically."""
    if len(m) != code.params.k:
        raise ValueError(f"expected {code.params.k}-bit message, got {len(m)}")
    return BitVec.from_array(code.encode_bits(m.to_array()[None, :])[0])


class RlcOracle(MembershipOracle):
    """Syndrome check H y^T = 0 on packed words via bytewise popcount."""

    def __init__(self, code):
        super().__init__(code.params)
        self.code = code
        self._h_packed = np.packbits(code.parity_check_matrix, axis=1)
        tail = 8 * self.params.nbytes - self.params.n
        self._word_mask = None
        if tail:
            # Ignore the unused trailing bits of the last byte.
            self._word_mask = _position_mask(self.params, np.arange(self.params.n))

    def decode_batch(self, words):
        words = np.asarray(words, dtype=np.uint8)
        if self._word_mask is not None:
            words = words & self._word_mask
        bad = np.zeros(words.shape[0], dtype=bool)
        for row in self._h_packed:
            bad |= (np.bitwise_count(words & row).sum(axis=1, dtype=np.uint32) & 1).astype(bool)
        return ~bad, words
