package ledger;

class CharClass {
    int kind(char c) {
        if (c >= 'a' && c <= 'z') {
            return 1;
        }
        if (c == '\n' || c == '\t') {
            return 2;
        }
        return 0;
    }
}
