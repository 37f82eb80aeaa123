# src/services/report_builder.py
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar
import json
import logging

import pandas as pd

from src.core.arith import DimTable, fit_piecewise
from src.core.config import Settings, settings as default_settings
from src.core.exceptions import KoszulScopeError, UsageError
from src.repositories.model_repository import ModelRepository
from src.schemas.reports import DimensionRecord, ResultStatus, RunConfig
from src.schemas.surfaces import K3Type
from src.services.ci_engine import CompleteIntersectionEngine
from src.services.oracle import euler_kernel_dim, foliation_dim_oracle, spot_check_smoothness

logger = logging.getLogger(__name__)

T = TypeVar("T")

RECORD_COLUMNS = ["surface", "d", "quantity", "value", "status", "provenance"]


@dataclass
class Report:
    records: List[DimensionRecord] = field(default_factory=list)
    trace: List[str] = field(default_factory=list)
    passed: bool = True
    summary: Optional[str] = None


class ReportBuilder:
    """Assembles per-(surface, d) records for every command"""

    def __init__(self, config_settings: Optional[Settings] = None):
        self.settings = config_settings or default_settings
        self.repository = ModelRepository(self.settings.model_dir)
        self.engine = CompleteIntersectionEngine(
            oracle_provider=self.repository.load,
            oracle_fallback=self.settings.oracle_fallback,
        )

    def _parallel(self, work: Sequence[Tuple[K3Type, int]], task: Callable[[K3Type, int], T]) -> List[T]:
        """Run task over work items; results keep the order of work"""
        with ThreadPoolExecutor(max_workers=self.settings.max_workers) as pool:
            return list(pool.map(lambda item: task(*item), work))

    @staticmethod
    def _work(config: RunConfig, d_floor: int = 0) -> List[Tuple[K3Type, int]]:
        return [
            (surface, d)
            for surface in K3Type.select(config.surface)
            for d in config.d_values
            if d >= d_floor
        ]

    # ------------------------------------------------------------------ dims

    def build_dims(self, config: RunConfig) -> Report:
        report = Report()
        work = self._work(config)
        results = self._parallel(work, self.engine.foliation_space_dim)

        for (surface, d), result in zip(work, results):
            status = result.status.value
            report.records.extend([
                DimensionRecord(surface=surface.value, d=d, quantity="h0_foliations",
                                value=result.h0 if result.h0 is not None else "unknown",
                                status=status, provenance=result.provenance),
                DimensionRecord(surface=surface.value, d=d, quantity="h0_omega1_pullback",
                                value=result.h0_omega1_pullback if result.h0_omega1_pullback is not None else "unknown",
                                status=status, provenance=result.provenance),
                DimensionRecord(surface=surface.value, d=d, quantity="h0_structure_terms",
                                value=result.h0_structure_terms,
                                status=ResultStatus.DETERMINED.value, provenance="hilbert-function"),
            ])
            if config.with_trace:
                report.trace.append(f"# {surface.value} d={d}")
                report.trace.extend(result.trace)

        if config.with_oracle:
            verification = self.build_verify(config)
            report.records.extend(verification.records)
            report.passed = report.passed and verification.passed
            report.summary = verification.summary

        if config.fit:
            for surface in K3Type.select(config.surface):
                entries = {
                    r.d: r.value for r in report.records
                    if r.surface == surface.value and r.quantity == "h0_foliations" and isinstance(r.value, int)
                }
                report.records.extend(self._fit_records(surface, "h0_foliations", entries))
        return report

    def _fit_records(self, surface: K3Type, quantity: str, entries: dict) -> List[DimensionRecord]:
        table = DimTable(entries=entries)
        if len(entries) >= self.settings.fit_min_run:
            table = fit_piecewise(table, min_run=self.settings.fit_min_run)
        records = [
            DimensionRecord(surface=surface.value, d=piece.d_min, quantity=f"{quantity}_fit",
                            value=piece.describe(), status="fitted", provenance="interpolation")
            for piece in table.fitted
        ]
        records.extend(
            DimensionRecord(surface=surface.value, d=d, quantity=f"{quantity}_fit",
                            value=value, status="exceptional", provenance="interpolation")
            for d, value in table.exceptional.items()
        )
        return records

    # ------------------------------------------------------------------ uniqueness

    def build_uniqueness(self, config: RunConfig) -> Report:
        report = Report()
        surfaces = K3Type.select(config.surface)
        thresholds = self._parallel([(s, 0) for s in surfaces], lambda s, _: self.engine.uniqueness_threshold(s))
        for surface, threshold in zip(surfaces, thresholds):
            report.records.append(DimensionRecord(
                surface=surface.value, d=threshold, quantity="uniqueness_threshold", value=threshold,
                status="Certified", provenance=f"window {self.settings.uniqueness_window}",
            ))

        work = self._work(config, d_floor=3)
        certificates = self._parallel(work, self.engine.uniqueness_certificate)
        for (surface, d), certificate in zip(work, certificates):
            details = "; ".join(str(o) for o in certificate.obstructions) or "H1 vanishes"
            report.records.append(DimensionRecord(
                surface=surface.value, d=d, quantity="uniqueness_certificate",
                value=certificate.verdict.value, status=certificate.verdict.value, provenance=details,
            ))
            if config.with_trace:
                report.trace.append(f"# {surface.value} d={d}")
                report.trace.extend(certificate.trace)
        return report

    # ------------------------------------------------------------------ singular scheme

    def build_singdeg(self, config: RunConfig) -> Report:
        report = Report()
        for surface, d in self._work(config):
            report.records.append(DimensionRecord(
                surface=surface.value, d=d, quantity="singular_scheme_degree",
                value=self.engine.singular_scheme_degree(surface, d),
                status=ResultStatus.DETERMINED.value, provenance="chern",
            ))
        return report

    # ------------------------------------------------------------------ oracle verification

    def build_verify(self, config: RunConfig) -> Report:
        report = Report()
        surfaces = K3Type.select(config.surface)
        for surface in surfaces:
            quotient = self.repository.load(surface)
            spot_check_smoothness(
                quotient,
                samples=self.settings.smoothness_samples,
                prime=self.settings.smoothness_prime,
                seed=self.settings.smoothness_seed,
            )
            quotient.prepare(max(config.d_max - 1, 0))

        def compare(surface: K3Type, d: int) -> List[DimensionRecord]:
            quotient = self.repository.load(surface)
            engine = self.engine.foliation_space_dim(surface, d)
            oracle_h0 = foliation_dim_oracle(quotient, d)
            oracle_omega = euler_kernel_dim(quotient, d - 1)
            rows = []
            for quantity, engine_value, oracle_value in (
                ("oracle_h0_foliations", engine.h0, oracle_h0),
                ("oracle_h0_omega1_pullback", engine.h0_omega1_pullback, oracle_omega),
            ):
                verdict = "PASS" if engine_value == oracle_value else "FAIL"
                rows.append(DimensionRecord(
                    surface=surface.value, d=d, quantity=quantity, value=oracle_value,
                    status=verdict, provenance=f"engine={engine_value} oracle={oracle_value}",
                ))
            return rows

        work = self._work(config, d_floor=1)
        for rows in self._parallel(work, compare):
            report.records.extend(rows)

        checks = [r for r in report.records if r.quantity == "oracle_h0_foliations"]
        passed = sum(1 for r in checks if r.status == "PASS")
        report.passed = all(r.status == "PASS" for r in report.records)
        report.summary = f"{'PASS' if report.passed else 'FAIL'} ({passed}/{len(checks)})"
        logger.info(f"{'✅' if report.passed else '❌'} Verification {report.summary}")
        return report

    # ------------------------------------------------------------------ dispatch

    def build(self, config: RunConfig) -> Report:
        builders = {
            "dims": self.build_dims,
            "uniqueness": self.build_uniqueness,
            "singdeg": self.build_singdeg,
            "verify": self.build_verify,
        }
        if config.d_max > self.settings.d_cap:
            raise UsageError(f"d_max {config.d_max} exceeds the cap {self.settings.d_cap}")
        try:
            return builders[config.command](config)
        except KoszulScopeError as e:
            logger.error(f"❌ {config.command} failed: {str(e)}")
            raise


def render(records: Sequence[DimensionRecord], output_format: str) -> str:
    rows = [record.model_dump() for record in records]
    if output_format == "json":
        return json.dumps(rows, indent=2)
    frame = pd.DataFrame(rows, columns=RECORD_COLUMNS)
    if output_format == "csv":
        return frame.to_csv(index=False)
    if output_format == "md":
        return frame.to_markdown(index=False)
    raise UsageError(f"unknown output format {output_format}")
