"""CSV and SVG output for the experiment runners."""
import logging
from pathlib import Path

import pandas as pd
import plotly.graph_objects as go

logger = logging.getLogger(__name__)

ITERATES = 'n [iterates]'
PROBABILITY = 'value [probability]'
RATE = 'value [nats/iterate]'

MEASURE_COLUMNS = [ITERATES, 'ball_id', PROBABILITY]
PUSHFORWARD_COLUMNS = ['k [iterates]', 'ball_id', PROBABILITY]
INTEGRAL_COLUMNS = [ITERATES, 'function_id', 'integral [dimensionless]',
                    'invariance_defect [dimensionless]', 'bound [dimensionless]']
PRESSURE_COLUMNS = ['method', ITERATES, RATE, 'extrapolated [nats/iterate]']
ORACLE_COLUMNS = ['period [iterates]', 'count [points]', 'ball_id', PROBABILITY,
                  'pressure [nats/iterate]']

BALL_COLORS = ['#4C78A8', '#F58518', '#54A24B', '#E45756', '#72B7B2', '#B279A2']


def table(rows, columns):
    """DataFrame with a fixed column order"""
    return pd.DataFrame(list(rows), columns=columns)


def write_csv(frame, path):
    """UTF-8, LF line endings, no index column"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, encoding='utf-8', lineterminator='\n', float_format='%.15g')
    logger.info("Wrote %s (%d rows)", path, len(frame))
    return path


def measure_figure(frame, references=None, title=''):
    """Grouped bars of ball measures per n, with dashed reference lines"""
    fig = go.Figure()
    ball_ids = list(dict.fromkeys(frame['ball_id']))
    for i, ball_id in enumerate(ball_ids):
        rows = frame[frame['ball_id'] == ball_id]
        fig.add_trace(go.Bar(x=rows[ITERATES], y=rows[PROBABILITY], name=str(ball_id),
                             marker_color=BALL_COLORS[i % len(BALL_COLORS)]))
    for i, ball_id in enumerate(ball_ids):
        if references and references.get(ball_id) is not None:
            fig.add_hline(y=references[ball_id], line_dash='dash',
                          line_color=BALL_COLORS[i % len(BALL_COLORS)],
                          annotation_text=f"{ball_id} reference {references[ball_id]:.4f}")
    fig.update_layout(
        title=title,
        barmode='group',
        xaxis_title='n [iterates]',
        yaxis_title='measure [probability]',
        template='plotly_white',
        width=900,
        height=500
    )
    return fig


def write_svg(fig, path):
    """Export through kaleido; a failure is logged and never fatal"""
    path = Path(path)
    try:
        fig.write_image(str(path), format='svg')
        logger.info("Wrote %s", path)
        return path
    except Exception as e:
        logger.warning("SVG export to %s failed: %s", path, e)
        return None
