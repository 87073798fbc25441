//! Turns a JSON object of flag values into command-line arguments.

use serde_json::Value;

use crate::error::CliError;

/// `--key=value` arguments for every non-null, non-false entry of `params`.
pub fn flags_from_json(params: &Value) -> Result<Vec<String>, CliError> {
    let Value::Object(map) = params else {
        return Err(CliError::Usage("parameters must be a JSON object".into()));
    };
    let mut out = Vec::new();
    for (key, value) in map {
        match value {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => out.push(format!("--{key}")),
            Value::Number(n) => out.push(format!("--{key}={n}")),
            Value::String(s) => out.push(format!("--{key}={s}")),
            Value::Array(items) => {
                let parts = items
                    .iter()
                    .map(|v| match v {
                        Value::Number(n) => Ok(n.to_string()),
                        Value::String(s) => Ok(s.clone()),
                        other => Err(CliError::Usage(format!(
                            "unsupported value for --{key}: {other}"
                        ))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                out.push(format!("--{key}={}", parts.join(",")));
            }
            Value::Object(_) => {
                out.push(format!("--{key}={value}"));
            }
        }
    }
    Ok(out)
}

fn is_value_flag(arg: &str) -> bool {
    matches!(arg, "--workers" | "--config")
}

/// Expands `--config FILE` in place: the file's flags are inserted right
/// after the subcommand name so that later explicit flags override them.
/// A `"command"` key names the subcommand when the arguments do not.
pub fn expand_config(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut path = None;
    let mut rest = Vec::with_capacity(args.len());
    let mut it = args.into_iter();
    if let Some(bin) = it.next() {
        rest.push(bin);
    }
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(
                it.next()
                    .ok_or_else(|| CliError::Usage("--config needs a file".into()))?,
            );
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("reading {path}: {e}")))?;
    let mut value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("parsing {path}: {e}")))?;
    let command = value
        .as_object_mut()
        .and_then(|m| m.remove("command"))
        .and_then(|c| c.as_str().map(str::to_string));
    let flags = flags_from_json(&value)?;

    // skip global flags and their values
    let mut i = 1;
    while i < rest.len() {
        let a = &rest[i];
        if is_value_flag(a) {
            i += 2;
        } else if a.starts_with("--workers=") {
            i += 1;
        } else {
            break;
        }
    }
    let i = i.min(rest.len());
    let has_command = rest.get(i).is_some_and(|a| !a.starts_with('-'));
    let insert_at = match (has_command, command) {
        (true, _) => i + 1,
        (false, Some(c)) => {
            rest.insert(i, c);
            i + 1
        }
        (false, None) => return Err(CliError::Usage(format!("{path} names no command"))),
    };
    rest.splice(insert_at..insert_at, flags);
    Ok(rest)
}
