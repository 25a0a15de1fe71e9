"""Command-line surface.

Thin wrappers over the SDK and server: every command prints the value the
underlying call returned and exits with a code from a fixed taxonomy:

    0  success
    1  validation failure (bad input, rejected request, nothing registered)
    2  detection (MITM detected, response invalid)
    3  transport failure (keyserver unreachable)

Config resolution order: built-in defaults, then the config file (key=value
lines), then AMAKEY_* environment variables, then flags.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from urllib.parse import urlsplit

import click

from . import harness as harness_mod
from . import wotsim
from .client import (
    RATING_QUESTIONS,
    AmaClient,
    CardCache,
    HttpTransport,
    ReportOutcome,
    SelfCheckResult,
    TrustReport,
)
from .errors import AmakeyError, TransportError, ValidationError
from .model import (
    AttestmentKind,
    AttestmentRef,
    ContactAddress,
    GuidelineChecklist,
    IdentityCard,
    KeyExpansionParams,
    Keypair,
    TriState,
    TrustPolicy,
    derive_keypair_from_passphrase,
    fingerprint,
    format_fingerprint_groups,
    sign_identity_card,
)
from .model.encoding import canonical_bytes
from .model.types import GUIDELINE_FLAGS
from .server import (
    AppendLogStorage,
    ArithmeticChallengeProvider,
    KeyserverService,
    LoggingDelivery,
    make_server,
    solve_arithmetic_puzzle,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_DETECTION = 2
EXIT_TRANSPORT = 3

ENV_SERVER = "AMAKEY_SERVER"
ENV_CACHE_DIR = "AMAKEY_CACHE_DIR"
ENV_CONFIG = "AMAKEY_CONFIG"


@dataclass(frozen=True)
class CliConfig:
    server_url: str = "http://127.0.0.1:8824"
    cache_dir: str = str(Path.home() / ".cache" / "amakey")
    alpha: int = 2
    beta: Fraction = Fraction(1, 2)
    salt_hex: str | None = None
    proxy_url: str | None = None

    def __post_init__(self):
        TrustPolicy(self.alpha, self.beta)
        for url in (self.server_url, self.proxy_url):
            if url is not None:
                parsed = urlsplit(url)
                if not parsed.scheme or not parsed.netloc:
                    raise ValidationError("bad_config", f"URL must be absolute: {url!r}")

    @property
    def policy(self) -> TrustPolicy:
        return TrustPolicy(self.alpha, self.beta)


def load_config(path: str | None, overrides: dict) -> CliConfig:
    values: dict = {}
    config_path = path or os.environ.get(ENV_CONFIG)
    if config_path and Path(config_path).exists():
        for raw in Path(config_path).read_text(encoding="utf-8").splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    if ENV_SERVER in os.environ:
        values["server_url"] = os.environ[ENV_SERVER]
    if ENV_CACHE_DIR in os.environ:
        values["cache_dir"] = os.environ[ENV_CACHE_DIR]
    values.update({k: v for k, v in overrides.items() if v is not None})
    if "alpha" in values:
        values["alpha"] = int(values["alpha"])
    if "beta" in values and not isinstance(values["beta"], Fraction):
        values["beta"] = Fraction(str(values["beta"]))
    known = {f for f in CliConfig.__dataclass_fields__}
    unknown = set(values) - known
    if unknown:
        raise ValidationError("bad_config", f"unknown config keys: {sorted(unknown)}")
    return CliConfig(**values)


JSON_SCHEMA_VERSION = "amakey/1"


def _emit_json(obj: dict) -> None:
    click.echo(canonical_bytes({"schema": JSON_SCHEMA_VERSION, **obj}).decode("utf-8"))


def _load_keypair(key_path: str | None, passphrase: str | None, salt_hex: str | None, iterations: int) -> Keypair:
    if key_path:
        return Keypair.from_private_pem(Path(key_path).read_bytes())
    if passphrase:
        if not salt_hex:
            raise ValidationError("bad_config", "passphrase-derived keys need --salt (or salt_hex in config)")
        params = KeyExpansionParams(iterations=iterations)
        return derive_keypair_from_passphrase(passphrase, bytes.fromhex(salt_hex), params)
    raise ValidationError("bad_config", "provide --key FILE or --passphrase")


def _report_to_json(report: TrustReport) -> dict:
    body: dict = {
        "outcome": report.outcome.value,
        "verified_rating_count": report.verified_rating_count,
        "stats": {f"s{i}": v for i, v in enumerate(report.recomputed_stats.as_tuple(), start=1)},
        "discrepancies": [{"kind": f.kind.value, "detail": f.detail} for f in report.discrepancies],
        "warnings": list(report.warnings),
    }
    if report.fingerprint is not None:
        body["fingerprint"] = report.fingerprint.digest
    if report.card is not None:
        card = report.card.card
        body["address"] = card.contact_address.value
        body["display_name"] = card.display_name or ""
        body["attestment"] = {"kind": card.attestment.kind.value, "value": card.attestment.value}
    return body


def _print_report(report: TrustReport, as_json: bool) -> None:
    if as_json:
        _emit_json(_report_to_json(report))
        return
    click.echo(f"outcome: {report.outcome.value}")
    if report.fingerprint is not None:
        click.echo(f"fingerprint: {format_fingerprint_groups(report.fingerprint)}")
    if report.card is not None:
        attestment = report.card.card.attestment
        click.echo(f"attestment ({attestment.kind.value}): {attestment.value}")
    stats = report.recomputed_stats
    click.echo(
        f"ratings: total={stats.s1} identity +{stats.s2}/-{stats.s3} "
        f"hash +{stats.s4}/-{stats.s5} authentic +{stats.s6}/-{stats.s7} "
        f"(verified {report.verified_rating_count})"
    )
    for finding in report.discrepancies:
        click.echo(f"discrepancy [{finding.kind.value}]: {finding.detail}")
    for warning in report.warnings:
        click.echo(f"warning: {warning}")


def _exit_for_report(report: TrustReport) -> int:
    if report.outcome is ReportOutcome.INVALID:
        return EXIT_DETECTION
    if report.outcome is ReportOutcome.NOT_FOUND:
        return EXIT_VALIDATION
    return EXIT_OK


def _client(config: CliConfig, keypair: Keypair | None = None, address: ContactAddress | None = None) -> AmaClient:
    cache = CardCache(config.cache_dir, keypair) if keypair is not None else None
    return AmaClient(
        HttpTransport(config.server_url),
        policy=config.policy,
        keypair=keypair,
        own_address=address,
        cache=cache,
        anonymous_transport=HttpTransport(config.server_url, proxy_url=config.proxy_url, anonymous=True),
    )


def _run(ctx: click.Context, fn) -> None:
    try:
        code = fn()
    except ValidationError as exc:
        click.echo(f"error [{exc.code}]: {exc.detail}", err=True)
        ctx.exit(EXIT_VALIDATION)
    except TransportError as exc:
        click.echo(f"transport error: {exc}", err=True)
        ctx.exit(EXIT_TRANSPORT)
    except AmakeyError as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(EXIT_VALIDATION)
    ctx.exit(code if code is not None else EXIT_OK)


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None, help="Config file (key = value lines).")
@click.option("--server", default=None, help="Keyserver base URL.")
@click.option("--cache-dir", default=None, help="Directory for the signed card cache.")
@click.option("--alpha", type=int, default=None, help="Minimum rating count for automatic trust.")
@click.option("--beta", default=None, help="Minimum agreement margin, e.g. 1/2.")
@click.option("--proxy", "proxy_url", default=None, help="Proxy URL for the anonymous transport profile.")
@click.pass_context
def main(ctx, config_path, server, cache_dir, alpha, beta, proxy_url):
    """Keyserver client, server, and analysis tools."""
    overrides = {
        "server_url": server,
        "cache_dir": cache_dir,
        "alpha": alpha,
        "beta": beta,
        "proxy_url": proxy_url,
    }
    try:
        ctx.obj = load_config(config_path, overrides)
    except ValidationError as exc:
        click.echo(f"error [{exc.code}]: {exc.detail}", err=True)
        ctx.exit(EXIT_VALIDATION)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8824)
@click.option("--db", "db_path", type=click.Path(), default=None, help="Append-log file; in-memory when omitted.")
@click.option("--verify-base-url", default=None, help="Base URL placed in verification links.")
@click.pass_context
def serve(ctx, host, port, db_path, verify_base_url):
    """Run the keyserver. Nonce deliveries are written to the log."""
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    storage = AppendLogStorage(db_path) if db_path else None
    service = KeyserverService(
        storage=storage,
        delivery=LoggingDelivery(),
        challenges=ArithmeticChallengeProvider(),
        verify_base_url=verify_base_url or f"http://{host}:{port}",
    )
    server = make_server(service, host, port)
    click.echo(f"keyserver listening on {server.url}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()


@main.command()
@click.option("--passphrase", prompt=True, hide_input=True, confirmation_prompt=True)
@click.option("--salt", "salt_hex", default=None, help="Salt as hex (>= 32 hex chars); defaults to config salt_hex.")
@click.option("--algorithm", type=click.Choice(["rsa-pss-sha256", "ed25519"]), default="rsa-pss-sha256")
@click.option("--rsa-bits", type=int, default=2048)
@click.option("--iterations", type=int, default=600_000, help="Key expansion iteration count.")
@click.option("--out", "out_path", type=click.Path(), default=None, help="Write the private key PEM here.")
@click.option("--group-size", type=int, default=4, help="Fingerprint display group size.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_context
def keygen(ctx, passphrase, salt_hex, algorithm, rsa_bits, iterations, out_path, group_size, fmt):
    """Derive a keypair from a passphrase and print its fingerprint."""

    def run():
        config: CliConfig = ctx.obj
        salt = salt_hex or config.salt_hex
        if not salt:
            raise ValidationError("bad_config", "a salt is required: pass --salt or set salt_hex in config")
        params = KeyExpansionParams(iterations=iterations)
        keypair = derive_keypair_from_passphrase(
            passphrase, bytes.fromhex(salt), params, algorithm=algorithm, rsa_bits=rsa_bits
        )
        fp = fingerprint(keypair.public)
        if out_path:
            Path(out_path).write_bytes(keypair.private_pem())
        if fmt == "json":
            _emit_json(
                {
                    "algorithm": keypair.algorithm,
                    "fingerprint": fp.digest,
                    "fingerprint_grouped": format_fingerprint_groups(fp, group_size),
                }
            )
        else:
            click.echo(f"algorithm:   {keypair.algorithm}")
            click.echo(f"fingerprint: {format_fingerprint_groups(fp, group_size)}")
            if out_path:
                click.echo(f"private key: {out_path}")
        return EXIT_OK

    _run(ctx, run)


def _guideline_checklist(flags: tuple[str, ...]) -> GuidelineChecklist:
    unknown = set(flags) - set(GUIDELINE_FLAGS)
    if unknown:
        raise ValidationError("bad_config", f"unknown guideline flags: {sorted(unknown)}")
    as_fields = {flag.replace("-", "_"): True for flag in flags}
    return GuidelineChecklist(**as_fields)


@main.command()
@click.argument("address")
@click.option("--scheme", type=click.Choice(["email", "phone", "other-id"]), default=None)
@click.option("--key", "key_path", type=click.Path(exists=True), default=None)
@click.option("--passphrase", default=None)
@click.option("--salt", "salt_hex", default=None)
@click.option("--iterations", type=int, default=600_000)
@click.option("--attestment-url", default=None, help="URL of the hosted attestment video.")
@click.option("--attestment-hash", default=None, help="Hex digest of the attestment video file.")
@click.option("--display-name", default=None)
@click.option("--guideline", "guidelines", multiple=True, help=f"Repeatable; one of: {', '.join(GUIDELINE_FLAGS)}")
@click.pass_context
def register(ctx, address, scheme, key_path, passphrase, salt_hex, iterations, attestment_url, attestment_hash, display_name, guidelines):
    """Build, sign, and upload an identity card for ADDRESS."""

    def run():
        config: CliConfig = ctx.obj
        keypair = _load_keypair(key_path, passphrase, salt_hex or config.salt_hex, iterations)
        if bool(attestment_url) == bool(attestment_hash):
            raise ValidationError("bad_config", "provide exactly one of --attestment-url / --attestment-hash")
        attestment = AttestmentRef(
            AttestmentKind.HOSTED_URL if attestment_url else AttestmentKind.CONTENT_HASH,
            attestment_url or attestment_hash,
            _guideline_checklist(guidelines),
        )
        contact = ContactAddress.parse(address, scheme=scheme)
        card = IdentityCard(contact, keypair.public, attestment, display_name=display_name)
        signed = sign_identity_card(card, keypair)
        _client(config).register(signed)
        click.echo("registration pending: confirm the nonce delivered to the address")
        return EXIT_OK

    _run(ctx, run)


@main.command("verify-nonce")
@click.argument("nonce")
@click.pass_context
def verify_nonce(ctx, nonce):
    """Confirm a registration nonce."""

    def run():
        _client(ctx.obj).confirm_registration(nonce)
        click.echo("verified")
        return EXIT_OK

    _run(ctx, run)


@main.command()
@click.argument("address")
@click.option("--scheme", type=click.Choice(["email", "phone", "other-id"]), default=None)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_context
def lookup(ctx, address, scheme, fmt):
    """Fetch and validate the card for ADDRESS; print the trust report."""

    def run():
        report = _client(ctx.obj).fetch_and_validate(ContactAddress.parse(address, scheme=scheme))
        _print_report(report, fmt == "json")
        return _exit_for_report(report)

    _run(ctx, run)


@main.command()
@click.argument("address")
@click.option("--scheme", type=click.Choice(["email", "phone", "other-id"]), default=None)
@click.option("--own-address", required=True, help="Your registered contact address.")
@click.option("--key", "key_path", type=click.Path(exists=True), default=None)
@click.option("--passphrase", default=None)
@click.option("--salt", "salt_hex", default=None)
@click.option("--iterations", type=int, default=600_000)
@click.option("--identity", "q_identity", type=click.Choice(["yes", "no", "unsure"]), default=None)
@click.option("--hash-match", "q_hash", type=click.Choice(["yes", "no", "unsure"]), default=None)
@click.option("--authentic", "q_authentic", type=click.Choice(["yes", "no", "unsure"]), default=None)
@click.option("--comment", default=None)
@click.option("--challenge-answer", default=None)
@click.option("--solve", is_flag=True, help="Auto-solve the built-in arithmetic challenge (dev only).")
@click.pass_context
def rate(ctx, address, scheme, own_address, key_path, passphrase, salt_hex, iterations, q_identity, q_hash, q_authentic, comment, challenge_answer, solve):
    """View a card's attestment reference and submit a signed rating."""

    def run():
        config: CliConfig = ctx.obj
        keypair = _load_keypair(key_path, passphrase, salt_hex or config.salt_hex, iterations)
        own = ContactAddress.parse(own_address)
        client = _client(config, keypair, own)
        subject = ContactAddress.parse(address, scheme=scheme)
        report = client.fetch_and_validate(subject)
        if report.outcome is ReportOutcome.NOT_FOUND:
            raise ValidationError("not_found", f"no card registered for {subject.value}")
        if report.outcome is ReportOutcome.INVALID:
            _print_report(report, False)
            raise ValidationError("invalid_response", "refusing to rate a card that failed validation")
        attestment = report.card.card.attestment
        click.echo(f"watch the attestment ({attestment.kind.value}): {attestment.value}")
        click.echo(f"fingerprint to check: {format_fingerprint_groups(report.fingerprint)}")

        prompts = (q_identity, q_hash, q_authentic)
        answers = tuple(
            TriState(value)
            if value is not None
            else TriState(click.prompt(question, type=click.Choice(["yes", "no", "unsure"])))
            for question, value in zip(RATING_QUESTIONS, prompts)
        )
        text = comment if comment is not None else click.prompt("Additional comments?", default="")

        challenge_id, puzzle = client.fetch_challenge()
        if challenge_answer is not None:
            answer = challenge_answer
        elif solve:
            answer = solve_arithmetic_puzzle(puzzle)
        else:
            answer = click.prompt(puzzle)
        client.review_and_rate(subject, answers, text, challenge_id, answer, subject_card=report.card)
        click.echo("rating stored")
        return EXIT_OK

    _run(ctx, run)


@main.command()
@click.argument("address")
@click.option("--scheme", type=click.Choice(["email", "phone", "other-id"]), default=None)
@click.option("--key", "key_path", type=click.Path(exists=True), default=None)
@click.option("--passphrase", default=None)
@click.option("--salt", "salt_hex", default=None)
@click.option("--iterations", type=int, default=600_000)
@click.pass_context
def remove(ctx, address, scheme, key_path, passphrase, salt_hex, iterations):
    """Remove the registration for ADDRESS with a signed request."""

    def run():
        config: CliConfig = ctx.obj
        keypair = _load_keypair(key_path, passphrase, salt_hex or config.salt_hex, iterations)
        client = _client(config, keypair)
        client.remove_signed(ContactAddress.parse(address, scheme=scheme))
        click.echo("removed")
        return EXIT_OK

    _run(ctx, run)


@main.group("remove-lost")
def remove_lost():
    """Removal flow for a lost private key (address-ownership nonce)."""


@remove_lost.command("begin")
@click.argument("address")
@click.option("--scheme", type=click.Choice(["email", "phone", "other-id"]), default=None)
@click.pass_context
def remove_lost_begin(ctx, address, scheme):
    def run():
        _client(ctx.obj).begin_removal_by_address(ContactAddress.parse(address, scheme=scheme))
        click.echo("removal pending: confirm the nonce delivered to the address")
        return EXIT_OK

    _run(ctx, run)


@remove_lost.command("confirm")
@click.argument("nonce")
@click.pass_context
def remove_lost_confirm(ctx, nonce):
    def run():
        _client(ctx.obj).confirm_removal(nonce)
        click.echo("removed")
        return EXIT_OK

    _run(ctx, run)


@main.command("self-check")
@click.option("--address", required=True)
@click.option("--scheme", type=click.Choice(["email", "phone", "other-id"]), default=None)
@click.option("--key", "key_path", type=click.Path(exists=True), default=None)
@click.option("--passphrase", default=None)
@click.option("--salt", "salt_hex", default=None)
@click.option("--iterations", type=int, default=600_000)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_context
def self_check(ctx, address, scheme, key_path, passphrase, salt_hex, iterations, fmt):
    """Anonymously look up your own address and compare the served key."""

    def run():
        config: CliConfig = ctx.obj
        keypair = _load_keypair(key_path, passphrase, salt_hex or config.salt_hex, iterations)
        own = ContactAddress.parse(address, scheme=scheme)
        client = _client(config, keypair, own)
        result = client.self_check()
        if fmt == "json":
            _emit_json({"result": result.value})
        else:
            click.echo(result.value)
        if result is SelfCheckResult.MITM_DETECTED:
            return EXIT_DETECTION
        if result is SelfCheckResult.NOT_REGISTERED:
            return EXIT_VALIDATION
        return EXIT_OK

    _run(ctx, run)


@main.command("wot-sim")
@click.option("--graph", "graph_path", type=click.Path(exists=True), default=None, help="Edge-list graph file.")
@click.option("--csv-out", type=click.Path(), default=None)
@click.pass_context
def wot_sim(ctx, graph_path, csv_out):
    """Run the certification-graph analysis (colluder demo when no graph given)."""

    def run():
        graph = wotsim.parse_graph(Path(graph_path).read_text(encoding="utf-8")) if graph_path else wotsim.build_eve_scenario()
        report = wotsim.attack_report(graph)
        csv_text = wotsim.report_to_csv(report)
        if csv_out:
            Path(csv_out).write_text(csv_text, encoding="utf-8")
            click.echo(f"report written to {csv_out}")
        else:
            click.echo(csv_text, nl=False)
        return EXIT_OK

    _run(ctx, run)


@main.group("harness")
def harness_group():
    """Adversarial scenario runner."""


@harness_group.command("run")
@click.argument("script", type=click.Path(exists=True))
@click.pass_context
def harness_run(ctx, script):
    """Run one declarative scenario script."""

    def run():
        spec = harness_mod.parse_scenario_script(Path(script).read_text(encoding="utf-8"))
        report = harness_mod.run_script(spec)
        click.echo(report.to_text(), nl=False)
        return EXIT_OK if report.detected else EXIT_DETECTION

    _run(ctx, run)


@harness_group.command("matrix")
@click.option("--policy", "policies", multiple=True, help="alpha:beta, e.g. 2:1/2. Repeatable.")
@click.option("--seeds", default="0", help="Comma-separated world seeds.")
@click.option("--csv-out", type=click.Path(), default=None)
@click.pass_context
def harness_matrix(ctx, policies, seeds, csv_out):
    """Run every behavior x policy combination and emit the detection table."""

    def run():
        parsed_policies = []
        for text in policies or ("2:1/2",):
            alpha, _, beta = text.partition(":")
            parsed_policies.append(TrustPolicy(int(alpha), Fraction(beta)))
        seed_list = tuple(int(s) for s in seeds.split(","))
        reports = harness_mod.scenario_matrix(parsed_policies, seed_list)
        csv_text = harness_mod.matrix_to_csv(reports)
        if csv_out:
            Path(csv_out).write_text(csv_text, encoding="utf-8")
            click.echo(f"matrix written to {csv_out}")
        else:
            click.echo(csv_text, nl=False)
        return EXIT_OK if all(r.detected for r in reports) else EXIT_DETECTION

    _run(ctx, run)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8870)
@click.option("--own-address", required=True)
@click.option("--key", "key_path", type=click.Path(exists=True), default=None)
@click.option("--passphrase", default=None)
@click.option("--salt", "salt_hex", default=None)
@click.option("--iterations", type=int, default=600_000)
@click.option("--ui-dir", type=click.Path(exists=True), default=None, help="Static UI bundle to serve.")
@click.pass_context
def bridge(ctx, host, port, own_address, key_path, passphrase, salt_hex, iterations, ui_dir):
    """Run the loopback bridge for the rating UI."""

    def run():
        from .client.bridge import make_bridge

        config: CliConfig = ctx.obj
        keypair = _load_keypair(key_path, passphrase, salt_hex or config.salt_hex, iterations)
        client = _client(config, keypair, ContactAddress.parse(own_address))
        server = make_bridge(client, host=host, port=port, ui_dir=ui_dir)
        click.echo(f"bridge listening on {server.url}")
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            server.shutdown()
        return EXIT_OK

    _run(ctx, run)


if __name__ == "__main__":
    main()
