"""Secret-key challenge-response over elements of the filter above a poset order.

Prover and verifier share a vector ``h`` of quasiorders.  The verifier sends ``b`` random
lattice terms; the prover answers with ``g(p(h))``, the encodings of the term values after
a post-processing map ``g``.  The verifier recomputes the same vector and compares bytes.
The concatenated response bodies can serve as a one-time pad.
"""

from __future__ import annotations

import base64
import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .errors import BadInput
from .latterm import EvalContext, LatTerm, evaluate, parse, random_term, to_text, variables
from .poset import Poset
from .quolattice import QUO_OPS, qum_set
from .relation import QuasiRel

__all__ = [
    "SharedKey",
    "Challenge",
    "Response",
    "Verdict",
    "Transcript",
    "keygen",
    "challenge",
    "respond",
    "verify",
    "vernam_key",
    "vernam_xor",
    "run_session",
    "run_sessions",
    "flip_bit",
]

_HEADER = 2  # bytes of the relation header


@dataclass(frozen=True)
class SharedKey:
    poset: Poset
    h: tuple[QuasiRel, ...]
    gen_count: int  # h[:gen_count] is the generating set the key was built from
    g_spec: str = "identity"  # or "perm:<seed>"
    b: int = 8
    depth: int = 5

    @property
    def k(self) -> int:
        return len(self.h)

    @property
    def n(self) -> int:
        return self.poset.n

    def body_len(self) -> int:
        return (self.n * self.n + 7) // 8

    def _perm(self) -> list[int] | None:
        if self.g_spec == "identity":
            return None
        kind, _, arg = self.g_spec.partition(":")
        if kind != "perm" or not arg.lstrip("-").isdigit():
            raise BadInput(f"unknown post-processing map {self.g_spec!r}")
        order = list(range(self.body_len()))
        random.Random(int(arg)).shuffle(order)
        return order

    def g(self, body: bytes) -> bytes:
        perm = self._perm()
        return body if perm is None else bytes(body[i] for i in perm)

    def g_inverse(self, body: bytes) -> bytes:
        perm = self._perm()
        if perm is None:
            return body
        out = bytearray(len(body))
        for pos, i in enumerate(perm):
            out[i] = body[pos]
        return bytes(out)

    def to_dict(self) -> dict:
        return {
            "poset": self.poset.to_dict(),
            "h": [r.to_b64() for r in self.h],
            "gen_count": self.gen_count,
            "g": self.g_spec,
            "b": self.b,
            "depth": self.depth,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SharedKey":
        p = Poset.from_dict(d["poset"])
        h = tuple(QuasiRel.from_b64(s) for s in d["h"])
        key = cls(p, h, int(d["gen_count"]), d.get("g", "identity"), int(d.get("b", 8)), int(d.get("depth", 5)))
        key.check()
        return key

    def check(self) -> None:
        mu = self.poset.order
        for i, r in enumerate(self.h):
            if r.n != self.n or not r.closed or not mu.issubset(r):
                raise BadInput(f"key component {i} is not a quasiorder above the poset order")
        if not 0 <= self.gen_count <= self.k:
            raise BadInput("generating prefix longer than the key")
        self._perm()


def _random_element(p: Poset, rng: random.Random) -> QuasiRel:
    pairs = [(rng.randrange(p.n), rng.randrange(p.n)) for _ in range(rng.randint(1, 3))]
    return qum_set(p, pairs)


def keygen(p: Poset, plan, pad: int = 0, seed: int = 0, b: int = 8, depth: int = 5, g: str = "identity") -> SharedKey:
    """``plan.E`` followed by ``pad`` random elements of the filter (deterministic in ``seed``)."""
    if pad < 0:
        raise BadInput("pad must be non-negative")
    rng = random.Random(seed)
    h = list(plan.E) + [_random_element(p, rng) for _ in range(pad)]
    if not h:
        raise BadInput("empty key: the generating set is empty and pad is 0")
    key = SharedKey(p, tuple(h), len(plan.E), g, b, depth)
    key.check()
    return key


@dataclass(frozen=True)
class Challenge:
    terms: tuple[LatTerm, ...]
    nonce: str

    def to_payload(self) -> dict:
        return {"nonce": self.nonce, "terms": [to_text(t) for t in self.terms]}

    @classmethod
    def from_payload(cls, d: dict) -> "Challenge":
        return cls(tuple(parse(s) for s in d["terms"]), str(d["nonce"]))


@dataclass(frozen=True)
class Response:
    blobs: tuple[bytes, ...]  # header + g(body) per term

    def to_payload(self) -> dict:
        return {"u": [base64.b64encode(x).decode("ascii") for x in self.blobs]}

    @classmethod
    def from_payload(cls, d: dict) -> "Response":
        try:
            return cls(tuple(base64.b64decode(s, validate=True) for s in d["u"]))
        except (ValueError, KeyError, TypeError) as exc:
            raise BadInput(f"malformed response payload: {exc}") from None


@dataclass(frozen=True)
class Verdict:
    accept: bool
    reason: str = ""


def challenge(key: SharedKey, seed: int) -> Challenge:
    rng = random.Random(seed)
    terms = tuple(random_term(key.k, key.depth, seed=rng) for _ in range(key.b))
    return Challenge(terms, f"{rng.getrandbits(64):016x}")


def _values(key: SharedKey, ch: Challenge) -> list[QuasiRel]:
    for t in ch.terms:
        bad = [i for i in variables(t) if not 0 <= i < key.k]
        if bad:
            raise BadInput(f"challenge term uses variables outside the key: {bad}")
    ctx = EvalContext(key.h, QUO_OPS)
    memo: dict = {}
    return [evaluate(t, ctx, memo) for t in ch.terms]


def respond(key: SharedKey, ch: Challenge) -> Response:
    return Response(tuple(v.encode()[:_HEADER] + key.g(v.to_bytes()) for v in _values(key, ch)))


def verify(key: SharedKey, ch: Challenge, resp: Response) -> Verdict:
    """Accept iff every response component equals the locally computed one bit for bit."""
    try:
        expected = respond(key, ch).blobs
    except BadInput as exc:
        return Verdict(False, f"bad challenge: {exc}")
    if len(resp.blobs) != len(expected):
        return Verdict(False, f"expected {len(expected)} components, got {len(resp.blobs)}")
    for i, (got, want) in enumerate(zip(resp.blobs, expected)):
        try:
            rel = QuasiRel.decode(got[:_HEADER] + key.g_inverse(got[_HEADER:]))
        except BadInput as exc:
            return Verdict(False, f"component {i}: {exc}")
        if rel.n != key.n:
            return Verdict(False, f"component {i}: relation on {rel.n} points, expected {key.n}")
        if got != want:
            return Verdict(False, f"component {i} differs")
    return Verdict(True, "ok")


def vernam_key(resp: Response) -> bytes:
    """Concatenated relation bodies of the response (headers dropped)."""
    return b"".join(x[_HEADER:] for x in resp.blobs)


def vernam_xor(keystream: bytes, message: bytes) -> bytes:
    if len(message) > len(keystream):
        raise BadInput(f"message of {len(message)} bytes is longer than the {len(keystream)}-byte keystream")
    return bytes(m ^ k for m, k in zip(message, keystream))


def flip_bit(resp: Response, component: int = 0, bit: int = 0) -> Response:
    """Copy of ``resp`` with one body bit flipped (for tamper tests)."""
    blobs = list(resp.blobs)
    blob = bytearray(blobs[component])
    pos = _HEADER + bit // 8
    blob[pos] ^= 0x80 >> (bit % 8)
    blobs[component] = bytes(blob)
    return Response(tuple(blobs))


# -- loopback transport -------------------------------------------------------------------


@dataclass
class Transcript:
    lines: list[str] = field(default_factory=list)

    def send(self, kind: str, session: str, payload: dict) -> dict:
        msg = {"type": kind, "session": session, "payload": payload}
        self.lines.append(json.dumps(msg, sort_keys=True))
        return json.loads(self.lines[-1])

    def messages(self) -> list[dict]:
        return [json.loads(x) for x in self.lines]

    def dump(self, path) -> None:
        Path(path).write_text("".join(x + "\n" for x in self.lines))

    @classmethod
    def load(cls, path) -> "Transcript":
        return cls([x for x in Path(path).read_text().splitlines() if x.strip()])


def run_session(
    key: SharedKey,
    session: str,
    seed: int,
    tamper: Callable[[Response], Response] | None = None,
    transcript: Transcript | None = None,
) -> tuple[Verdict, Transcript]:
    """One prover/verifier exchange over the line-delimited loopback channel.
    ``tamper`` may rewrite the response in flight."""
    tr = transcript if transcript is not None else Transcript()
    tr.send("hello", session, {"n": key.n, "k": key.k})
    msg = tr.send("challenge", session, challenge(key, seed).to_payload())
    # prover side: only sees the wire message
    resp = respond(key, Challenge.from_payload(msg["payload"]))
    if tamper is not None:
        resp = tamper(resp)
    msg = tr.send("response", session, resp.to_payload())
    # verifier side
    try:
        got = Response.from_payload(msg["payload"])
        verdict = verify(key, challenge(key, seed), got)
    except BadInput as exc:
        verdict = Verdict(False, str(exc))
    tr.send("verdict", session, {"accept": verdict.accept, "reason": verdict.reason})
    return verdict, tr


def run_sessions(key: SharedKey, seeds, tamper=None, workers: int = 4) -> list[tuple[Verdict, Transcript]]:
    """Independent sessions run concurrently; each has its own transcript."""
    seeds = list(seeds)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda s: run_session(key, f"s{s}", s, tamper), seeds))
