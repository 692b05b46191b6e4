#!/usr/bin/env python3
"""
Main entry point for torsym.
This module provides the command-line interface: validation, symmetry
analysis, automorphisms, blow-ups, admissible triples, the catalog and
Delzant polytopes.
"""

import argparse
import logging
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

from .catalog import catalog_entry
from .charpair import (
    CharacteristicPair,
    check_delzant_sign_theorem,
    check_vertex_class_bound,
    delzant_pair,
    facet_classes,
    normalize_omniorientation,
    validate_pair,
)
from .documents import (
    delzant_to_dict,
    emit_pair_document,
    format_facets,
    format_vector,
    json_matrix,
    json_vector,
    pair_to_dict,
    parse_delzant_document,
    parse_pair_document,
    render_report,
)
from .errors import (
    CatalogParameterError,
    DomainError,
    InvalidPairError,
    NotAPartitionError,
    ParseError,
    SizeGuardError,
    ZeroDualError,
)
from .settings import TorsymSettings, load_settings, setup_environment
from .symmetry import (
    StepKind,
    aut_char_pair,
    blowdown,
    blowup_face,
    build_construction_tree,
    exceptional_label,
    extract_admissible_triple,
    group_string,
    maximal_group_type,
)

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'
LOG_DATEFMT = '%Y-%m-%d %H:%M:%S'

logger = logging.getLogger("torsym")


@dataclass
class CommandOutput:
    """What a command prints and the exit code it returns."""
    exit_code: int = 0
    report: Optional[Dict[str, Any]] = None
    text: Optional[List[str]] = None
    document: Optional[str] = None

    def render(self, as_json: bool) -> str:
        if self.document is not None:
            return self.document
        return render_report(self.report or {}, as_json, self.text)


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format=LOG_FORMAT,
        datefmt=LOG_DATEFMT,
        stream=sys.stderr,
        force=True,
    )


def read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except (OSError, UnicodeDecodeError) as e:
        raise ParseError(f"cannot read {path}: {str(e)}") from e


def load_pair(path: str) -> CharacteristicPair:
    return parse_pair_document(read_text(path))


def _header(settings: TorsymSettings, command: str) -> Dict[str, Any]:
    return {"schema": settings.report_schema, "command": command}


def _require_valid(pair: CharacteristicPair) -> None:
    report = validate_pair(pair)
    if not report.ok:
        raise InvalidPairError("; ".join(report.violations))


def cmd_validate(path: str, settings: TorsymSettings) -> CommandOutput:
    """Validate a pair document; exit code 0 iff the pair is valid."""
    pair = load_pair(path)
    report = validate_pair(pair)
    bound: Optional[Dict[str, Any]] = None
    if report.ok:
        try:
            vertex_report = check_vertex_class_bound(pair)
            bound = {
                "ok": vertex_report.ok,
                "violations": [{"vertex": list(v), "class": list(c)} for v, c in vertex_report.violations],
            }
        except ZeroDualError as e:
            bound = {"ok": False, "violations": [], "error": str(e)}
    result = _header(settings, "validate")
    result.update({
        "valid": report.ok,
        "rank": pair.n,
        "facets": len(pair.facets),
        "closed": report.complex_report.is_closed,
        "violations": list(report.violations),
        "singular_faces": [list(face) for face in report.singular_faces],
        "vertex_class_bound": bound,
    })
    text = [
        f"valid: {'yes' if report.ok else 'no'}",
        f"rank: {pair.n}",
        f"facets: {len(pair.facets)}",
    ]
    text.extend(f"violation: {v}" for v in report.violations)
    if bound is not None:
        text.append(f"vertex class bound: {'ok' if bound['ok'] else 'violated'}")
    return CommandOutput(exit_code=0 if report.ok else 1, report=result, text=text)


def symmetry_sections(pair: CharacteristicPair, prefix: str) -> Dict[str, Any]:
    """Normalization, classes, group type, Weyl partition and construction tree of a valid pair."""
    normalized, signs = normalize_omniorientation(pair)
    partition = facet_classes(normalized)
    group = maximal_group_type(normalized)
    tree = build_construction_tree(normalized, prefix)
    steps = []
    for step in tree.steps:
        if step.kind is StepKind.BLOW_UP:
            steps.append({"kind": step.kind.value, "class": list(step.class_facets),
                          "exceptional": step.exceptional})
        else:
            d = step.decomposition
            steps.append({"kind": step.kind.value, "class": list(step.class_facets), "k": d.k,
                          "chosen": d.chosen_facet, "mu": json_vector(d.mu), "reduced_rank": d.reduced_pair.n})
    return {
        "flipped": list(signs.flipped),
        "classes": [{"facets": list(c.facets), "dual": json_vector(c.label)} for c in partition.classes],
        "group": group_string(group),
        "su_sizes": list(group.su_sizes),
        "torus_rank": group.torus_rank,
        "weyl_partition": [list(block) for block in partition.blocks()],
        "construction_tree": {
            "steps": steps,
            "split_sizes": list(tree.split_sizes),
            "leaf": pair_to_dict(tree.leaf),
            "leaf_partition": [list(block) for block in tree.leaf_partition],
        },
    }


def symmetry_text(sections: Dict[str, Any]) -> List[str]:
    flipped = sections["flipped"]
    lines = [
        f"signs: {'identity' if not flipped else 'flip ' + ','.join(flipped)}",
        "classes: " + " ".join(format_facets(c["facets"]) for c in sections["classes"]),
        f"group: {sections['group']}",
        "weyl partition: " + " ".join(format_facets(b) for b in sections["weyl_partition"]),
        "construction tree:",
    ]
    for step in sections["construction_tree"]["steps"]:
        if step["kind"] == StepKind.BLOW_UP.value:
            lines.append(f"  BlowUp {format_facets(step['class'])} -> {step['exceptional']}")
        else:
            lines.append(
                f"  SplitOff {format_facets(step['class'])} k={step['k']} at {step['chosen']}"
                f" mu={format_vector(step['mu'])} -> rank {step['reduced_rank']}"
            )
    leaf = sections["construction_tree"]["leaf"]
    lines.append(f"leaf: rank {leaf['n']}, {len(leaf['facets'])} facets")
    return lines


def cmd_symmetry(path: str, settings: TorsymSettings) -> CommandOutput:
    pair = load_pair(path)
    _require_valid(pair)
    sections = symmetry_sections(pair, settings.exceptional_prefix)
    result = _header(settings, "symmetry")
    result.update(sections)
    return CommandOutput(report=result, text=symmetry_text(sections))


def cmd_aut(path: str, settings: TorsymSettings) -> CommandOutput:
    """
    List the automorphisms of the normalized pair and mark those lifted from
    class-preserving permutations.

    Raises:
        SizeGuardError: more facets than the configured guard
    """
    pair = load_pair(path)
    _require_valid(pair)
    if len(pair.facets) > settings.size_guard:
        raise SizeGuardError(
            f"{len(pair.facets)} facets exceeds the automorphism guard of {settings.size_guard} (TORSYM_SIZE_GUARD)"
        )
    normalized, signs = normalize_omniorientation(pair)
    classes = [frozenset(c.facets) for c in facet_classes(normalized).classes]
    entries = []
    text = []
    for automorphism in aut_char_pair(normalized):
        in_image = all(automorphism.f.image(c) == c for c in classes)
        entries.append({
            "permutation": [[source, target] for source, target in automorphism.f.pairs],
            "matrix": json_matrix(automorphism.g),
            "in_phi_image": in_image,
        })
        moves = " ".join(f"{s}->{t}" for s, t in automorphism.f.pairs)
        rows = " ".join(format_vector(row) for row in json_matrix(automorphism.g))
        text.append(f"  {moves}  g={rows}{'  phi' if in_image else ''}")
    result = _header(settings, "aut")
    result.update({
        "flipped": list(signs.flipped),
        "order": len(entries),
        "phi_image_order": sum(1 for e in entries if e["in_phi_image"]),
        "automorphisms": entries,
    })
    header = [f"order: {len(entries)}", f"phi image order: {result['phi_image_order']}"]
    return CommandOutput(report=result, text=header + text)


def _split_names(text: str) -> List[str]:
    return [name.strip() for name in text.split(",") if name.strip()]


def cmd_blowup(path: str, face: str, label: Optional[str], settings: TorsymSettings) -> CommandOutput:
    pair = load_pair(path)
    label = label or exceptional_label(pair, settings.exceptional_prefix)
    blown_up = blowup_face(pair, _split_names(face), label)
    return CommandOutput(document=emit_pair_document(blown_up))


def cmd_blowdown(path: str, facet: str, face: Optional[str], settings: TorsymSettings) -> CommandOutput:
    pair = load_pair(path)
    result = blowdown(pair, facet, _split_names(face) if face else None)
    return CommandOutput(document=emit_pair_document(result))


def parse_partition(text: Optional[str], facets: Sequence[str]) -> List[List[str]]:
    """
    Parse "F1,F3|F2,F4"; facets not mentioned become singleton blocks.

    Raises:
        NotAPartitionError: unknown or repeated facet names
    """
    blocks = [_split_names(part) for part in (text or "").split("|")]
    blocks = [block for block in blocks if block]
    mentioned = [f for block in blocks for f in block]
    unknown = [f for f in mentioned if f not in facets]
    if unknown:
        raise NotAPartitionError(f"partition names unknown facets {unknown}")
    if len(set(mentioned)) != len(mentioned):
        raise NotAPartitionError("partition repeats a facet")
    blocks.extend([f] for f in facets if f not in mentioned)
    return blocks


def cmd_triple(path: str, partition: Optional[str], settings: TorsymSettings) -> CommandOutput:
    pair = load_pair(path)
    _require_valid(pair)
    blocks = parse_partition(partition, pair.facets)
    triple = extract_admissible_triple(pair, blocks, settings.exceptional_prefix)
    result = _header(settings, "triple")
    result.update({
        "blocks": [list(b) for b in triple.blocks],
        "chosen": list(triple.chosen),
        "psi_data": [json_vector(mu) for mu in triple.psi_data],
        "marked": list(triple.marked),
        "reduced_pair": pair_to_dict(triple.reduced_pair),
    })
    text = [f"reduced rank: {triple.reduced_pair.n}"]
    for block, chosen, mu, marked in zip(triple.blocks, triple.chosen, triple.psi_data, triple.marked):
        text.append(f"block {format_facets(block)} keep {chosen} mu={format_vector(mu)} marked={marked or '-'}")
    text.append("reduced pair:")
    text.extend(emit_pair_document(triple.reduced_pair).rstrip("\n").split("\n"))
    return CommandOutput(report=result, text=text)


def cmd_catalog(name: str, params: Sequence[str], settings: TorsymSettings) -> CommandOutput:
    values = []
    for p in params:
        try:
            values.append(int(p))
        except ValueError:
            raise CatalogParameterError(f"catalog parameter {p!r} is not an integer") from None
    entry = catalog_entry(name, values)
    return CommandOutput(document=emit_pair_document(entry.pair))


def cmd_delzant(path: str, settings: TorsymSettings) -> CommandOutput:
    """Build the pair of a Delzant polytope, check the sign theorem and analyse symmetry."""
    inequalities = parse_delzant_document(read_text(path))
    pair = delzant_pair(inequalities)
    sign_report = check_delzant_sign_theorem(pair)
    sections = symmetry_sections(pair, settings.exceptional_prefix)
    result = _header(settings, "delzant")
    result.update({
        "polytope": delzant_to_dict(inequalities),
        "pair": pair_to_dict(pair),
        "sign_theorem": {
            "ok": sign_report.ok,
            "violations": [
                {"facets": [a, b], "duals": [json_vector(pa), json_vector(pb)]}
                for a, b, pa, pb in sign_report.violations
            ],
            "classes": [list(c) for c in sign_report.classes],
        },
    })
    result.update(sections)
    text = [f"sign theorem: {'pass' if sign_report.ok else 'FAIL'}"]
    text.extend(f"  {a} vs {b}: {format_vector(pa)} = -{format_vector(pb)}" for a, b, pa, pb in sign_report.violations)
    text.extend(symmetry_text(sections))
    return CommandOutput(exit_code=0 if sign_report.ok else 1, report=result, text=text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Emit a machine-readable JSON report")
    common.add_argument("--output", help="Write output to FILE instead of stdout")
    common.add_argument("--verbose", action="store_true", help="Log progress to stderr")

    parser = argparse.ArgumentParser(description="torsym - symmetries of quasitoric manifolds from characteristic pairs")
    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    validate_parser = subparsers.add_parser("validate", parents=[common], help="Validate a pair document")
    validate_parser.add_argument("file", help="Pair document (- for stdin)")

    symmetry_parser = subparsers.add_parser("symmetry", parents=[common], help="Maximal symmetry group type")
    symmetry_parser.add_argument("file", help="Pair document (- for stdin)")

    aut_parser = subparsers.add_parser("aut", parents=[common], help="Automorphisms of a pair")
    aut_parser.add_argument("file", help="Pair document (- for stdin)")

    blowup_parser = subparsers.add_parser("blowup", parents=[common], help="Blow up a face")
    blowup_parser.add_argument("file", help="Pair document (- for stdin)")
    blowup_parser.add_argument("--face", required=True, help="Comma-separated facets, e.g. F1,F2")
    blowup_parser.add_argument("--label", help="Name of the exceptional facet")

    blowdown_parser = subparsers.add_parser("blowdown", parents=[common], help="Blow down an exceptional facet")
    blowdown_parser.add_argument("file", help="Pair document (- for stdin)")
    blowdown_parser.add_argument("facet", help="Exceptional facet")
    blowdown_parser.add_argument("--face", help="Face to restore, searched when omitted")

    triple_parser = subparsers.add_parser("triple", parents=[common], help="Admissible triple of an orbit partition")
    triple_parser.add_argument("file", help="Pair document (- for stdin)")
    triple_parser.add_argument("--partition", help='Blocks such as "F1,F3|F2,F4"; others are singletons')

    catalog_parser = subparsers.add_parser("catalog", parents=[common], help="Emit a catalog pair")
    catalog_parser.add_argument("name", help="cp, product, hirzebruch, bott, polygon, p5 or prism")
    catalog_parser.add_argument("params", nargs="*", help="Integer parameters")

    delzant_parser = subparsers.add_parser("delzant", parents=[common], help="Pair of a Delzant polytope")
    delzant_parser.add_argument("file", help="Inequality document (- for stdin)")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return 2

    settings = load_settings(environment=setup_environment())
    configure_logging("INFO" if args.verbose else settings.log_level)

    try:
        if args.command == "validate":
            output = cmd_validate(args.file, settings)
        elif args.command == "symmetry":
            output = cmd_symmetry(args.file, settings)
        elif args.command == "aut":
            output = cmd_aut(args.file, settings)
        elif args.command == "blowup":
            output = cmd_blowup(args.file, args.face, args.label, settings)
        elif args.command == "blowdown":
            output = cmd_blowdown(args.file, args.facet, args.face, settings)
        elif args.command == "triple":
            output = cmd_triple(args.file, args.partition, settings)
        elif args.command == "catalog":
            output = cmd_catalog(args.name, args.params, settings)
        elif args.command == "delzant":
            output = cmd_delzant(args.file, settings)
        else:
            parser.print_help()
            return 2
    except ParseError as e:
        logger.error(f"Parse error: {str(e)}")
        print(f"error: {e}", file=sys.stderr)
        return 2
    except DomainError as e:
        logger.error(f"{type(e).__name__}: {str(e)}")
        print(f"error: {e}", file=sys.stderr)
        return 1

    rendered = output.render(args.json)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as f:
            f.write(rendered)
        logger.info(f"Wrote {args.output}")
    else:
        sys.stdout.write(rendered)
    return output.exit_code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
