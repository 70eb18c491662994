//! roff manual page built from the clap definition.

use clap::{Arg, Command, CommandFactory};

use crate::args::Cli;

fn escape(text: &str) -> String {
    text.replace('\\', "\\e")
        .lines()
        .map(|l| {
            if l.starts_with('.') || l.starts_with('\'') {
                format!("\\&{l}")
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn option_line(arg: &Arg) -> Option<String> {
    if arg.is_positional() || arg.is_hide_set() {
        return None;
    }
    let mut names = Vec::new();
    if let Some(s) = arg.get_short() {
        names.push(format!("\\-{s}"));
    }
    if let Some(l) = arg.get_long() {
        names.push(format!("\\-\\-{l}"));
    }
    let value = arg
        .get_value_names()
        .map(|v| format!(" {}", v.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" ")))
        .filter(|_| arg.get_action().takes_values())
        .unwrap_or_default();
    let mut help = arg.get_help().map(|h| h.to_string()).unwrap_or_default();
    let possible: Vec<String> = arg
        .get_possible_values()
        .iter()
        .filter(|p| !p.is_hide_set())
        .map(|p| p.get_name().to_string())
        .collect();
    if !possible.is_empty() && arg.get_action().takes_values() {
        help.push_str(&format!(" [one of: {}]", possible.join(", ")));
    }
    let defaults: Vec<String> = arg
        .get_default_values()
        .iter()
        .map(|d| d.to_string_lossy().into_owned())
        .collect();
    if !defaults.is_empty() && arg.get_action().takes_values() {
        help.push_str(&format!(" [default: {}]", defaults.join(",")));
    }
    Some(format!(
        ".TP\n\\fB{}\\fR{}\n{}\n",
        names.join(", "),
        value,
        escape(help.trim())
    ))
}

fn section_for(cmd: &Command) -> String {
    let mut out = format!(".SS {}\n", cmd.get_name());
    if let Some(about) = cmd.get_about() {
        out.push_str(&format!("{}\n", escape(&about.to_string())));
    }
    for arg in cmd.get_arguments() {
        if let Some(line) = option_line(arg) {
            out.push_str(&line);
        }
    }
    out
}

pub fn render() -> String {
    let cmd = Cli::command();
    let name = cmd.get_name().to_string();
    let version = cmd.get_version().unwrap_or("");
    let mut page = format!(".TH {} 1 \"\" \"{name} {version}\"\n", name.to_uppercase());
    page.push_str(&format!(
        ".SH NAME\n{name} \\- {}\n",
        escape(&cmd.get_about().map(|a| a.to_string()).unwrap_or_default())
    ));
    page.push_str(&format!(
        ".SH SYNOPSIS\n\\fB{name}\\fR \\fICOMMAND\\fR [\\fIOPTIONS\\fR]\n"
    ));
    page.push_str(".SH COMMANDS\n");
    for sub in cmd.get_subcommands().filter(|s| s.get_name() != "help") {
        page.push_str(&section_for(sub));
    }
    if let Some(after) = cmd.get_after_help() {
        page.push_str(".SH NOTES\n");
        for line in after.to_string().lines() {
            page.push_str(&format!("{}\n.br\n", escape(line.trim())));
        }
    }
    page
}
