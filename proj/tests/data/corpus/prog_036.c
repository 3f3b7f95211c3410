#include <stdio.h>
int calc(int y)
{
    int val = 0;
    int n;
    for (n = 0; n < y; n++) {
        val = val + n;
    }
    return val;
}
int main(void)
{
    int y = 26;
    int n = calc(y);
    printf("%d\n", n);
    return 0;
}
