// Minimal polling helpers.  The console polls after actions instead of
// holding a push channel open; one operator, desk scale.

export function startPolling(fn: () => Promise<void>, intervalMs = 2000): () => void {
  let stopped = false;
  let timer: ReturnType<typeof setTimeout> | undefined;
  const tick = async () => {
    try {
      await fn();
    } catch {
      // keep polling; the callback surfaces its own errors
    }
    if (!stopped) timer = setTimeout(tick, intervalMs);
  };
  timer = setTimeout(tick, intervalMs);
  return () => {
    stopped = true;
    if (timer) clearTimeout(timer);
  };
}

// Resolve once `probe` stops throwing, or fail after the deadline.
export async function waitUntilReady(
  probe: () => Promise<unknown>,
  timeoutMs = 15000,
  stepMs = 200,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      await probe();
      return;
    } catch (error) {
      if (Date.now() > deadline) throw error;
      await new Promise((resolve) => setTimeout(resolve, stepMs));
    }
  }
}
