"""Scripts auxiliares do kmv (execuções longas fora da suíte de testes)."""
