fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Vowel-group syllable estimate with silent-e handling; never below 1.
///
/// Each maximal run of `a e i o u y` counts once. A final lone `e` (preceded
/// by a non-vowel) is dropped unless it is the only vowel group.
pub fn count_syllables(word: &str) -> u32 {
    let lower: Vec<char> = word.chars().flat_map(char::to_lowercase).collect();
    let mut groups = 0u32;
    let mut in_group = false;
    for &c in &lower {
        if is_vowel(c) {
            if !in_group {
                groups += 1;
            }
            in_group = true;
        } else {
            in_group = false;
        }
    }
    let n = lower.len();
    let silent_e = n >= 2 && lower[n - 1] == 'e' && !is_vowel(lower[n - 2]);
    if silent_e && groups > 1 {
        groups -= 1;
    }
    groups.max(1)
}
