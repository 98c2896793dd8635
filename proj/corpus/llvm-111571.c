void f() {
    int arr[5] = {1, 2, 3, 4, 5};
    for (int k = 0; k < 5; k++) {
        arr[k] *= 2;
    }
}
