/** Editor persistence, so a reload does not lose a drawn path. */

import { EditablePath, isValidPathSpec, type EditablePathState } from "./path.js";

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

const KEY = "path-studio.editor.v1";

export interface PersistedState {
  path: EditablePathState;
  frameCount: number;
  level: number;
  resolution: number;
}

export function saveEditorState(state: PersistedState, store: StorageLike): void {
  store.setItem(KEY, JSON.stringify(state));
}

export function loadEditorState(store: StorageLike): PersistedState | null {
  const raw = store.getItem(KEY);
  if (!raw) return null;
  try {
    const state = JSON.parse(raw) as PersistedState;
    const path = EditablePath.fromState(state.path);
    // discard stale states that would not serialize into a valid PathSpec
    if (path.isValid() && !isValidPathSpec(path.toPathSpec())) return null;
    if (!(state.frameCount >= 2) || !(state.level >= 0 && state.level <= 255)) return null;
    return state;
  } catch {
    return null;
  }
}
