"""Loop unrolling, seeded-contradiction test generation and the trace algebra behind them."""
