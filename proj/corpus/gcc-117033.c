long f() {
    long x = 0;
    for (int i = 0; i < 5; ++i) {
        while (x < 37) {
            if (x % 2 == 0) {
                x += 4;
            }
        }
    }
    return x;
}
