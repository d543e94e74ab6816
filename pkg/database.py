import json
import uuid
from datetime import datetime

from sqlalchemy import create_engine, Column, String, DateTime, Text, Integer
from sqlalchemy.orm import declarative_base, sessionmaker

from settings import database_url

Base = declarative_base()


def _new_id():
    return str(uuid.uuid4())


class ExperimentRun(Base):
    __tablename__ = 'experiment_runs'

    id = Column(String(36), primary_key=True, default=_new_id)
    command = Column(String(50), nullable=False)  # 'measure', 'pressure' or 'oracle'
    config_hash = Column(String(64), nullable=False)
    config_json = Column(Text, nullable=False)
    output_dir = Column(String(500), nullable=True)
    exit_code = Column(Integer, nullable=True)
    started_at = Column(DateTime, default=datetime.utcnow)
    finished_at = Column(DateTime, nullable=True)


class RunResult(Base):
    __tablename__ = 'run_results'

    id = Column(String(36), primary_key=True, default=_new_id)
    run_id = Column(String(36), nullable=False)
    table_name = Column(String(100), nullable=False)
    row_index = Column(Integer, nullable=False)
    row_json = Column(Text, nullable=False)


class DatabaseManager:
    def __init__(self, url=None):
        """Initialize database connection"""
        self.database_url = url or database_url()
        if not self.database_url:
            raise ValueError("DATABASE_URL environment variable is required")

        self.engine = create_engine(self.database_url)
        self.SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=self.engine)

        # Create tables
        Base.metadata.create_all(bind=self.engine)

    def get_db_session(self):
        """Get database session"""
        return self.SessionLocal()

    def create_run(self, run_id: str, command: str, config_hash: str, config_json: str, output_dir: str = None):
        """Register a run before any output is written"""
        db = self.get_db_session()
        try:
            db.add(ExperimentRun(id=run_id, command=command, config_hash=config_hash,
                                 config_json=config_json, output_dir=output_dir))
            db.commit()
            return run_id
        except Exception as e:
            db.rollback()
            raise e
        finally:
            db.close()

    def save_results(self, run_id: str, table_name: str, rows):
        """Store the rows of one output table, one record per row"""
        db = self.get_db_session()
        try:
            for index, row in enumerate(rows):
                db.add(RunResult(run_id=run_id, table_name=table_name, row_index=index,
                                 row_json=json.dumps(row, sort_keys=True, default=float)))
            db.commit()
        except Exception as e:
            db.rollback()
            raise e
        finally:
            db.close()

    def finish_run(self, run_id: str, exit_code: int):
        """Stamp the exit code and finish time"""
        db = self.get_db_session()
        try:
            run = db.query(ExperimentRun).filter(ExperimentRun.id == run_id).first()
            if run:
                run.exit_code = exit_code
                run.finished_at = datetime.utcnow()
            db.commit()
        except Exception as e:
            db.rollback()
            raise e
        finally:
            db.close()

    def get_run(self, run_id: str):
        """Get one run as a dict, or None"""
        db = self.get_db_session()
        try:
            run = db.query(ExperimentRun).filter(ExperimentRun.id == run_id).first()
            if not run:
                return None
            return {
                'id': run.id,
                'command': run.command,
                'config_hash': run.config_hash,
                'output_dir': run.output_dir,
                'exit_code': run.exit_code,
                'started_at': run.started_at,
                'finished_at': run.finished_at
            }
        finally:
            db.close()

    def get_results(self, run_id: str, table_name: str):
        """Rows of one stored table in their original order"""
        db = self.get_db_session()
        try:
            rows = db.query(RunResult).filter(
                RunResult.run_id == run_id, RunResult.table_name == table_name
            ).order_by(RunResult.row_index.asc()).all()
            return [json.loads(row.row_json) for row in rows]
        finally:
            db.close()

    def list_runs(self, config_hash: str = None, limit: int = 50):
        """Most recent runs first, optionally for one config"""
        db = self.get_db_session()
        try:
            query = db.query(ExperimentRun)
            if config_hash:
                query = query.filter(ExperimentRun.config_hash == config_hash)
            runs = query.order_by(ExperimentRun.started_at.desc()).limit(limit).all()
            return [{'id': run.id, 'command': run.command, 'exit_code': run.exit_code,
                     'started_at': run.started_at} for run in runs]
        finally:
            db.close()
