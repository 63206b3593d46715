// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Optional JSON-lines sink for solver iterates.

use std::io::Write;
use std::sync::Mutex;

static SINK: Mutex<Option<Box<dyn Write + Send>>> = Mutex::new(None);

/// Route solver iterate records to `w`, one JSON object per line.
pub fn set_sink(w: Box<dyn Write + Send>) {
    *SINK.lock().expect("debug sink lock") = Some(w);
}

pub fn clear_sink() {
    if let Some(mut w) = SINK.lock().expect("debug sink lock").take() {
        let _ = w.flush();
    }
}

pub fn enabled() -> bool {
    SINK.lock().map(|s| s.is_some()).unwrap_or(false)
}

pub fn emit(record: &serde_json::Value) {
    if let Ok(mut guard) = SINK.lock() {
        if let Some(w) = guard.as_mut() {
            let _ = writeln!(w, "{record}");
        }
    }
}
