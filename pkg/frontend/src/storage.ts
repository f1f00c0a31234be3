// Browser-storage persistence for the run list, so iterative what-if
// exploration survives page reloads. Entries are keyed per server origin;
// stale ids (e.g. after a server restart without snapshots) are pruned when
// the app revalidates them against the status endpoint.

export interface StoredRun {
  run_id: string;
  label: string;
  submitted_at: number;
}

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

export function storeKey(origin: string): string {
  return `orgsim.runs.${origin}`;
}

export class RunStore {
  constructor(
    private readonly storage: StorageLike,
    private readonly key: string,
  ) {}

  list(): StoredRun[] {
    const raw = this.storage.getItem(this.key);
    if (raw === null) {
      return [];
    }
    try {
      const parsed = JSON.parse(raw);
      return Array.isArray(parsed) ? (parsed as StoredRun[]) : [];
    } catch {
      return [];
    }
  }

  add(run: StoredRun): void {
    const runs = this.list().filter((r) => r.run_id !== run.run_id);
    runs.push(run);
    this.storage.setItem(this.key, JSON.stringify(runs));
  }

  remove(runId: string): void {
    this.storage.setItem(
      this.key,
      JSON.stringify(this.list().filter((r) => r.run_id !== runId)),
    );
  }

  keep(runIds: Set<string>): void {
    this.storage.setItem(
      this.key,
      JSON.stringify(this.list().filter((r) => runIds.has(r.run_id))),
    );
  }
}
