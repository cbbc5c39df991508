"""Dynamic four-parameter density models for intraday electricity price
spreads, with rolling-window density forecasting, pinball-loss model
selection and risk-gated battery arbitrage backtesting."""

__version__ = "0.1.0"
