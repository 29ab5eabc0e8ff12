// Free-form label entry with set semantics: whatever the annotator types,
// the chip list never holds the same normalized label twice, so the service
// can never receive duplicates from this client.

export function normalizeLabel(raw: string): string {
  return raw.trim().toLowerCase().replace(/\s+/g, ' ');
}

/** Split comma/newline-separated free text into normalized non-empty labels. */
export function parseLabelInput(text: string): string[] {
  return text
    .split(/[,\n]/)
    .map(normalizeLabel)
    .filter((label) => label.length > 0);
}

export class ChipList {
  private chips: string[] = [];

  /** Add one label; returns false when empty or already present. */
  add(raw: string): boolean {
    const label = normalizeLabel(raw);
    if (!label || this.chips.includes(label)) return false;
    this.chips.push(label);
    return true;
  }

  /** Add every label in a free-text entry; duplicates collapse silently. */
  addFromInput(text: string): string[] {
    const added: string[] = [];
    for (const label of parseLabelInput(text)) {
      if (this.add(label)) added.push(label);
    }
    return added;
  }

  remove(label: string): void {
    this.chips = this.chips.filter((chip) => chip !== normalizeLabel(label));
  }

  /** Insertion-ordered labels, duplicate-free by construction. */
  values(): string[] {
    return [...this.chips];
  }

  get size(): number {
    return this.chips.length;
  }

  clear(): void {
    this.chips = [];
  }
}

/**
 * Session-local autocomplete vocabulary. Suggests previously used labels by
 * prefix; purely advisory, it never constrains what can be entered.
 */
export class SuggestionIndex {
  private seen = new Set<string>();

  addAll(labels: Iterable<string>): void {
    for (const label of labels) {
      const normalized = normalizeLabel(label);
      if (normalized) this.seen.add(normalized);
    }
  }

  suggest(prefix: string, limit = 5): string[] {
    const needle = normalizeLabel(prefix);
    if (!needle) return [];
    return [...this.seen]
      .filter((label) => label.startsWith(needle) && label !== needle)
      .sort()
      .slice(0, limit);
  }
}
