"""
Fixed-order circuit IR over control registers and qubit wires.

Control registers (any dimension) are only ever Hadamard-transformed, used as
CSWAP controls, or measured.  Wires (dimension = gate dimension) are swapped
and hit by black-box gates.  A CSWAP fires when the control register's basis
value is in ``values``, which lets a single instruction condition on an
arbitrary predicate of the control value.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..hadamard import SignMatrix

CONTROL, WIRE = "control", "wire"


@dataclass(frozen=True)
class Register:
    name: str
    dim: int
    kind: str


@dataclass(frozen=True)
class Hadamard:
    reg: str
    signs: SignMatrix
    inverse: bool = False

    @property
    def op(self):
        return "INV_HADAMARD" if self.inverse else "HADAMARD"


@dataclass(frozen=True)
class CSwap:
    control: str
    values: tuple
    a: str
    b: str
    op = "CSWAP"


@dataclass(frozen=True)
class BlackBox:
    gate: int
    wire: str
    op = "BLACKBOX"


@dataclass(frozen=True)
class Measure:
    reg: str
    op = "MEASURE"


@dataclass
class CausalCircuit:
    registers: list = field(default_factory=list)
    instructions: list = field(default_factory=list)

    def __post_init__(self):
        self._regs = {r.name: r for r in self.registers}

    def register(self, name) -> Register:
        try:
            return self._regs[name]
        except KeyError:
            raise ValueError(f"undeclared register {name!r}") from None

    def _declare(self, name, dim, kind):
        if name in self._regs:
            raise ValueError(f"register {name!r} declared twice")
        if dim < 1:
            raise ValueError("register dimension must be positive")
        reg = Register(name, int(dim), kind)
        self.registers.append(reg)
        self._regs[name] = reg
        return name

    def add_control(self, name, dim):
        return self._declare(name, dim, CONTROL)

    def add_wire(self, name, dim=2):
        return self._declare(name, dim, WIRE)

    def _need(self, name, kind):
        reg = self.register(name)
        if reg.kind != kind:
            raise ValueError(f"register {name!r} is a {reg.kind}, expected a {kind}")
        return reg

    def hadamard(self, reg, signs: SignMatrix, inverse=False):
        if self._need(reg, CONTROL).dim != signs.size:
            raise ValueError(f"sign matrix of size {signs.size} on register {reg!r}")
        self.instructions.append(Hadamard(reg, signs, inverse))

    def inv_hadamard(self, reg, signs: SignMatrix):
        self.hadamard(reg, signs, inverse=True)

    def cswap(self, control, values, a, b):
        ctrl = self._need(control, CONTROL)
        values = tuple(sorted(int(v) for v in values))
        if values and not (0 <= values[0] and values[-1] < ctrl.dim):
            raise ValueError(f"control values out of range for {control!r}")
        if self._need(a, WIRE).dim != self._need(b, WIRE).dim:
            raise ValueError("CSWAP wires must have equal dimension")
        if a == b:
            raise ValueError("CSWAP needs two distinct wires")
        if values:
            self.instructions.append(CSwap(control, values, a, b))

    def blackbox(self, gate, wire):
        self._need(wire, WIRE)
        if gate < 0:
            raise ValueError("gate index must be non-negative")
        self.instructions.append(BlackBox(int(gate), wire))

    def measure(self, reg):
        self._need(reg, CONTROL)
        self.instructions.append(Measure(reg))

    @property
    def controls(self):
        return [r for r in self.registers if r.kind == CONTROL]

    @property
    def wires(self):
        return [r for r in self.registers if r.kind == WIRE]

    def blackbox_counts(self) -> dict:
        counts = {}
        for ins in self.instructions:
            if isinstance(ins, BlackBox):
                counts[ins.gate] = counts.get(ins.gate, 0) + 1
        return counts

    def to_json(self) -> dict:
        out = []
        for ins in self.instructions:
            if isinstance(ins, Hadamard):
                out.append({"op": ins.op, "reg": ins.reg, "sign_factors": ins.signs.to_json()})
            elif isinstance(ins, CSwap):
                out.append({"op": ins.op, "control": ins.control, "values": list(ins.values),
                            "a": ins.a, "b": ins.b})
            elif isinstance(ins, BlackBox):
                out.append({"op": ins.op, "gate": ins.gate, "wire": ins.wire})
            else:
                out.append({"op": ins.op, "reg": ins.reg})
        return {
            "registers": [{"name": r.name, "dim": r.dim, "kind": r.kind} for r in self.registers],
            "instructions": out,
        }
