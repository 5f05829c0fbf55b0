# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import json
import logging
import os
import tempfile
from collections.abc import Iterable
from pathlib import Path

import pandas as pd
from sqlalchemy import inspect, text

from cf4cf.common.meta_objects import EvaluationReport

logger = logging.getLogger(__name__)


def write_atomic(path: str | Path, content: str) -> Path:
    """
    Writes text to a temporary file next to the target and renames it into place.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile(
        "w",
        encoding="utf-8",
        newline="",
        dir=path.parent,
        prefix=f".{path.name}.",
        delete=False,
    ) as tmp:
        tmp.write(content)
    os.replace(tmp.name, path)
    return path


def frame_to_csv(df: pd.DataFrame, path: str | Path, index: bool = False) -> Path:
    return write_atomic(path, df.to_csv(index=index, lineterminator="\n"))


class WriteOutput:
    """
    Writes the results of an experiment to CSV and JSON files and optionally to a database.

    Database tables receive an experiment column, rows of a previous run with
    the same experiment id are deleted first.

    Args:
        experiment_id (str): The ID of the experiment as a unique classifier.
        export_path (str | Path): The directory results are written to.
        db_engine: The database engine. Defaults to None.
    """

    def __init__(
        self,
        experiment_id: str,
        export_path: str | Path,
        db_engine=None,
    ):
        self.experiment_id = experiment_id
        self.export_path = Path(export_path)
        self.export_path.mkdir(parents=True, exist_ok=True)
        self.db = db_engine

        if self.db is not None:
            self.delete_db_experiment(self.experiment_id)

    def delete_db_experiment(self, experiment_id: str):
        """
        Deletes all rows of the given experiment id from every table.

        Args:
            experiment_id (str): The ID of the experiment as a unique classifier.
        """
        for table_name in inspect(self.db).get_table_names():
            try:
                with self.db.begin() as db:
                    query = text(
                        f'delete from "{table_name}" where experiment = :experiment'
                    )
                    rowcount = db.execute(query, {"experiment": experiment_id}).rowcount
                    logger.debug("deleted %s rows from %s", rowcount, table_name)
            except Exception as e:
                logger.error(
                    f"could not clear old experiments from table {table_name} - {e}"
                )

    def write_json(self, name: str, payload: dict | list) -> Path:
        path = self.export_path / name
        write_atomic(path, json.dumps(payload, indent=2) + "\n")
        logger.info("wrote %s", path)
        return path

    def write_csv(self, name: str, df: pd.DataFrame, table: str | None = None) -> Path:
        """
        Writes a frame to a CSV file and, if a database is connected, appends it to a table.

        Args:
            name (str): file name below the export path
            df (pandas.DataFrame): the data
            table (str, optional): database table name, defaults to the file stem
        """
        path = frame_to_csv(df, self.export_path / name)
        logger.info("wrote %s", path)
        if self.db is not None:
            self.store_table(table or Path(name).stem, df)
        return path

    def store_table(self, table: str, df: pd.DataFrame):
        if df.empty:
            return
        df = df.assign(experiment=self.experiment_id)
        with self.db.begin() as db:
            df.to_sql(table, db, if_exists="append", index=False)
        logger.debug("stored %d rows in %s", len(df), table)

    def write_reports(
        self, reports: Iterable[EvaluationReport], prefix: str = ""
    ) -> list[Path]:
        """
        Writes the report JSON plus the per-dataset tau and the impact curve CSVs.
        """
        # deferred, the harness depends on cf4cf.common
        from cf4cf.evaluation.harness import impact_frame, tau_frame

        reports = list(reports)
        payload = {"reports": [report.to_dict() for report in reports]}
        return [
            self.write_json(f"{prefix}report.json", payload),
            self.write_csv(f"{prefix}tau.csv", tau_frame(reports), table="tau"),
            self.write_csv(f"{prefix}impact.csv", impact_frame(reports), table="impact"),
        ]

    def write_sweep(self, reports: Iterable[EvaluationReport]) -> list[Path]:
        from cf4cf.evaluation.harness import curve_frame

        reports = list(reports)
        return [
            self.write_csv("curve.csv", curve_frame(reports), table="curve"),
            self.write_json(
                "sweep_report.json", {"reports": [r.to_dict() for r in reports]}
            ),
        ]
