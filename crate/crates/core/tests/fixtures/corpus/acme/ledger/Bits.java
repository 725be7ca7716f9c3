package ledger;

class Bits {
    int mix(int mask, int shift) {
        int r = mask << shift;
        r = r >> 1;
        r = r >>> 2;
        r = r ^ shift;
        r ^= mask | 0xFF;
        if ((mask & 1) != 0) {
            r = ~r;
        }
        r %= 7;
        r -= 1;
        r /= 2;
        r <<= 1;
        r >>= 1;
        r >>>= 1;
        r &= 255;
        r |= 1;
        return r;
    }
}
