/// Counts physical lines that hold at least one character of code, i.e.
/// lines that are neither blank nor made up only of comments.
///
/// Text and char literals are tracked so that `//` or `/*` inside them is
/// not mistaken for a comment.
pub fn loc_count(source: &str) -> usize {
    #[derive(PartialEq)]
    enum State {
        Code,
        Block,
        Str,
        Chr,
    }
    let mut state = State::Code;
    let mut count = 0;
    for line in source.lines() {
        let chars: Vec<char> = line.chars().collect();
        let mut has_code = false;
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let next = chars.get(i + 1).copied();
            match state {
                State::Block => {
                    if c == '*' && next == Some('/') {
                        state = State::Code;
                        i += 1;
                    }
                }
                State::Str | State::Chr => {
                    has_code = true;
                    let close = if state == State::Str { '"' } else { '\'' };
                    if c == '\\' {
                        i += 1;
                    } else if c == close {
                        state = State::Code;
                    }
                }
                State::Code => {
                    if c == '/' && next == Some('/') {
                        break;
                    } else if c == '/' && next == Some('*') {
                        state = State::Block;
                        i += 1;
                    } else if !c.is_whitespace() {
                        has_code = true;
                        if c == '"' {
                            state = State::Str;
                        } else if c == '\'' {
                            state = State::Chr;
                        }
                    }
                }
            }
            i += 1;
        }
        // literals cannot span lines
        if matches!(state, State::Str | State::Chr) {
            state = State::Code;
        }
        if has_code {
            count += 1;
        }
    }
    count
}
