#include <stdio.h>
int apply(int n[], int len)
{
    int res = n[0];
    int val;
    for (val = 1; val < len; val++) {
        if (n[val] < res) {
            res = n[val];
        }
    }
    return res;
}
int main(void)
{
    int n[7] = {-11, -40, -32, -37, 45, -7, 44};
    int len = 7;
    printf("%d\n", apply(n, len));
    return 0;
}
