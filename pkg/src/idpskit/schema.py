"""Feature schema and attack taxonomy: the two editable lookup tables.

Both are line-oriented text files with '#' comments:

* schema:   ``name,kind[,symbol=code...]`` with kind continuous|symbolic,
  one line per feature, file order = feature order;
* taxonomy: ``attack_name,class_id`` with class ids in 0..5.
"""

from dataclasses import dataclass, field
from importlib import resources

N_FEATURES = 41
N_CLASSES = 6
OTHER_CLASS = 5

CLASS_NAMES = {0: "normal", 1: "dos", 2: "probe", 3: "r2l", 4: "u2r", 5: "other"}

CONTINUOUS = "continuous"
SYMBOLIC = "symbolic"


@dataclass
class FeatureDescriptor:
    name: str
    kind: str
    code_map: dict = field(default_factory=dict)


@dataclass
class FeatureSchema:
    """Ordered list of the 41 feature descriptors.

    Symbolic descriptors carry a text->code map. ``assign_code`` extends a
    map with the next free code (permissive encoding) and the extension is
    persisted by ``save``; encoding is a pure function of the saved schema.
    """

    descriptors: list

    def __post_init__(self):
        if len(self.descriptors) != N_FEATURES:
            raise ValueError(
                f"schema must have {N_FEATURES} features, got {len(self.descriptors)}"
            )
        for d in self.descriptors:
            if d.kind not in (CONTINUOUS, SYMBOLIC):
                raise ValueError(f"{d.name}: unknown kind {d.kind!r}")
            codes = list(d.code_map.values())
            if any(c < 0 for c in codes) or len(set(codes)) != len(codes):
                raise ValueError(f"{d.name}: codes must be distinct and non-negative")

    def assign_code(self, index: int, symbol: str) -> int:
        d = self.descriptors[index]
        code = max(d.code_map.values(), default=-1) + 1
        d.code_map[symbol] = code
        return code

    @property
    def names(self):
        return [d.name for d in self.descriptors]


@dataclass
class AttackTaxonomy:
    """Attack-name -> class-id map; unknown names fall to class 5 (other)."""

    class_of: dict

    def __post_init__(self):
        for name, cid in self.class_of.items():
            if not 0 <= cid < N_CLASSES:
                raise ValueError(f"{name}: class id {cid} outside 0..{N_CLASSES - 1}")
        if self.class_of.get("normal", 0) != 0:
            raise ValueError('"normal" must map to class 0')

    @property
    def class_names(self):
        return dict(CLASS_NAMES)

    def lookup(self, name: str) -> int:
        return self.class_of.get(name, OTHER_CLASS)


def _data_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def parse_schema(text: str) -> FeatureSchema:
    descriptors = []
    for lineno, line in _data_lines(text):
        parts = [p.strip() for p in line.split(",")]
        if len(parts) < 2:
            raise ValueError(f"schema line {lineno}: expected name,kind")
        name, kind = parts[0], parts[1]
        code_map = {}
        for token in parts[2:]:
            sym, sep, code = token.partition("=")
            if not sep or not code.isdigit():
                raise ValueError(f"schema line {lineno}: bad code token {token!r}")
            code_map[sym] = int(code)
        descriptors.append(FeatureDescriptor(name, kind, code_map))
    return FeatureSchema(descriptors)


def format_schema(schema: FeatureSchema) -> str:
    lines = []
    for d in schema.descriptors:
        if d.kind == SYMBOLIC:
            codes = sorted(d.code_map.items(), key=lambda kv: kv[1])
            tokens = "".join(f",{sym}={code}" for sym, code in codes)
            lines.append(f"{d.name},{SYMBOLIC}{tokens}")
        else:
            lines.append(f"{d.name},{CONTINUOUS}")
    return "\n".join(lines) + "\n"


def parse_taxonomy(text: str) -> AttackTaxonomy:
    class_of = {}
    for lineno, line in _data_lines(text):
        name, _, cid = line.partition(",")
        name, cid = name.strip(), cid.strip()
        if not name or not cid.lstrip("-").isdigit():
            raise ValueError(f"taxonomy line {lineno}: expected attack_name,class_id")
        class_of[name] = int(cid)
    return AttackTaxonomy(class_of)


def format_taxonomy(taxonomy: AttackTaxonomy) -> str:
    lines = [f"{name},{cid}" for name, cid in sorted(taxonomy.class_of.items())]
    return "\n".join(lines) + "\n"


def load_schema(path) -> FeatureSchema:
    with open(path, encoding="utf-8") as fh:
        return parse_schema(fh.read())


def save_schema(schema: FeatureSchema, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_schema(schema))


def load_taxonomy(path) -> AttackTaxonomy:
    with open(path, encoding="utf-8") as fh:
        return parse_taxonomy(fh.read())


def save_taxonomy(taxonomy: AttackTaxonomy, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_taxonomy(taxonomy))


def default_schema() -> FeatureSchema:
    text = resources.files("idpskit.data").joinpath("default_schema.txt").read_text()
    return parse_schema(text)


def default_taxonomy() -> AttackTaxonomy:
    text = resources.files("idpskit.data").joinpath("default_taxonomy.txt").read_text()
    return parse_taxonomy(text)
