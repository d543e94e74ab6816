import hashlib
import json
import logging
import uuid
from datetime import datetime

from database import DatabaseManager
from settings import database_url

logger = logging.getLogger(__name__)


def config_digest(config_json):
    return hashlib.sha256(config_json.encode('utf-8')).hexdigest()


class RunManager:
    def __init__(self, url=None):
        """Initialize the run ledger with database support"""
        self.runs = {}
        self.results = {}
        self.db = None

        url = url or database_url()
        if url:
            try:
                self.db = DatabaseManager(url)
            except Exception as e:
                logger.warning("Run ledger database unavailable (%s); keeping runs in memory", e)
                # Fallback to in-memory storage
                self.db = None

    @property
    def persistent(self):
        return self.db is not None

    def start_run(self, command, config_json, output_dir=None):
        """Register a run and return its id"""
        run_id = str(uuid.uuid4())
        digest = config_digest(config_json)
        self.runs[run_id] = {
            'id': run_id,
            'command': command,
            'config_hash': digest,
            'output_dir': output_dir,
            'exit_code': None,
            'started_at': datetime.utcnow(),
            'finished_at': None
        }

        if self.db:
            try:
                self.db.create_run(run_id, command, digest, config_json, output_dir)
            except Exception as e:
                logger.warning("Failed to save run to database: %s", e)
                self.db = None
        return run_id

    def record_table(self, run_id, table_name, frame):
        """Keep the rows of an output table alongside the run"""
        rows = json.loads(frame.to_json(orient='records'))
        self.results[(run_id, table_name)] = rows

        if self.db:
            try:
                self.db.save_results(run_id, table_name, rows)
            except Exception as e:
                logger.warning("Failed to save %s rows to database: %s", table_name, e)

    def finish_run(self, run_id, exit_code):
        """Stamp exit code and finish time"""
        run = self.runs.get(run_id)
        if run:
            run['exit_code'] = exit_code
            run['finished_at'] = datetime.utcnow()

        if self.db:
            try:
                self.db.finish_run(run_id, exit_code)
            except Exception as e:
                logger.warning("Failed to finish run in database: %s", e)

    def get_run(self, run_id):
        if self.db:
            try:
                return self.db.get_run(run_id)
            except Exception:
                pass
        return self.runs.get(run_id)

    def get_results(self, run_id, table_name):
        if self.db:
            try:
                return self.db.get_results(run_id, table_name)
            except Exception:
                pass
        return self.results.get((run_id, table_name), [])
