/** Bounded FIFO. When full the oldest entry is dropped, never the newest. */
export class BoundedQueue<T> {
  private items: T[] = [];

  constructor(readonly capacity: number) {
    if (!Number.isInteger(capacity) || capacity < 1) {
      throw new Error(`capacity must be a positive integer, got ${capacity}`);
    }
  }

  get length(): number {
    return this.items.length;
  }

  /** Returns false when an older entry had to be dropped to make room. */
  push(item: T): boolean {
    let kept = true;
    if (this.items.length >= this.capacity) {
      this.items.shift();
      kept = false;
    }
    this.items.push(item);
    return kept;
  }

  shift(): T | undefined {
    return this.items.shift();
  }

  clear(): void {
    this.items = [];
  }
}
