#include <stdio.h>
int helper(int c)
{
    int res = 0;
    int x;
    for (x = 0; x < c; x++) {
        res = res * x;
    }
    return res;
}
int main(void)
{
    int c = 12;
    int x = helper(c);
    printf("%d\n", x);
    return 0;
}
